use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use crspin::config::{CheckName, OutputFormat, RunConfig};
use crspin::run::{run, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Check {
    Identities,
    Spectrum,
    Cohomology,
    Vanishing,
    Conformal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Kohn-Dirac identity, spectrum, cohomology and vanishing checks on model
/// CR manifolds.
#[derive(Debug, Parser)]
#[command(name = "crspin", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Checks to run, overriding the config.
    #[arg(long, value_enum, num_args = 1..)]
    check: Vec<Check>,
    /// Treat truncation warnings as failures.
    #[arg(long)]
    strict: bool,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format, overriding the config.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let checks = (!cli.check.is_empty()).then(|| {
        cli.check
            .iter()
            .map(|c| match c {
                Check::Identities => CheckName::Identities,
                Check::Spectrum => CheckName::Spectrum,
                Check::Cohomology => CheckName::Cohomology,
                Check::Vanishing => CheckName::Vanishing,
                Check::Conformal => CheckName::Conformal,
            })
            .collect()
    });
    let format = cli.format.map(|f| match f {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    });
    let opts = RunOptions { checks, strict: cli.strict, out: cli.out, format };
    let summary = match run(&cfg, &opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for r in &summary.reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status} {}", r.check);
        if let Some(e) = &r.error {
            eprintln!("error: {}: {e}", r.check);
        }
        for res in r.residuals.iter().filter(|x| !x.passed) {
            eprintln!("  {}: {:e} > {:e}", res.name, res.value, res.tol);
        }
        for w in &r.warnings {
            eprintln!("  warning: {w}");
        }
    }
    println!("reports written to {}", summary.out_dir.display());
    ExitCode::from(summary.exit_code() as u8)
}
