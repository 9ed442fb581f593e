//! Batch execution of configured checks and artifact writing.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::clifford::clifford_suite;
use crate::cohomology::{
    bijection_defect, dirac_kohn_defect, harmonic_spinor_table, kohn_table, sector_identity_defect, shift_table, Method,
};
use crate::config::{CheckName, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::io::{spectrum_csv, to_json, write_matrix_market};
use crate::models::{bianchi_residual, ricci_consistency, PseudoHermitianModel};
use crate::operators::{
    assemble_dirac_squared, assemble_dminus, assemble_dplus, assemble_kohn_dirac, assemble_nabla_t,
    assemble_nabla_t_formula, assemble_twistor, block_spectrum, contraction, SectionSpace,
};
use crate::vanishing::{contradictions, obstruction_check, vanishing_verdicts};
use crate::weitzenboeck::{admissible_weights, conformal_check, dl_residual, q_split, sl_residual, ConformalScale};

/// Command-line overrides of the config.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub checks: Option<Vec<CheckName>>,
    pub strict: bool,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

impl Residual {
    fn new(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Residual { name: name.into(), value, tol, passed: value <= tol }
    }

    /// A pass/fail condition reported as `0` (holds) or `1`.
    fn flag(name: impl Into<String>, holds: bool) -> Self {
        Residual { name: name.into(), value: if holds { 0.0 } else { 1.0 }, tol: 0.0, passed: holds }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub model: String,
    pub m: usize,
    pub ell: i64,
    pub passed: bool,
    pub error: Option<String>,
    pub residuals: Vec<Residual>,
    pub warnings: Vec<String>,
    pub artifacts: Vec<String>,
    pub data: Value,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub reports: Vec<CheckReport>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

struct Outcome {
    residuals: Vec<Residual>,
    warnings: Vec<String>,
    files: Vec<(String, String)>,
    data: Value,
}

impl Outcome {
    fn new() -> Self {
        Outcome { residuals: Vec::new(), warnings: Vec::new(), files: Vec::new(), data: Value::Null }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    model: PseudoHermitianModel,
    format: OutputFormat,
}

fn identities(ctx: &Ctx) -> Result<Outcome> {
    let tol = &ctx.cfg.tolerances;
    let model = &ctx.model;
    let mut o = Outcome::new();
    let suite = clifford_suite(model.m)?;
    o.residuals.push(Residual::flag("clifford relations (exact)", suite.passed()));
    o.residuals.push(Residual::new("ricci consistency", ricci_consistency(model), tol.algebraic));
    if let Some(b) = bianchi_residual(model) {
        o.residuals.push(Residual::new("bianchi residual", b, tol.algebraic));
    }
    if !model.has_section_space() {
        for q in 0..=model.m {
            let s = q_split(model, model.ell, q)?;
            o.residuals.push(Residual::new(format!("Q split reassembly q={q}"), s.reassembly_defect, tol.algebraic));
            o.residuals.push(Residual::new(format!("tr K q={q}"), s.k_trace.abs(), tol.algebraic));
        }
        return Ok(o);
    }
    let space = SectionSpace::new(model)?;
    let dp = assemble_dplus(&space)?;
    let dm = assemble_dminus(&space)?;
    o.residuals.push(Residual::new("|D+^2|", (&dp.matrix * &dp.matrix).norm(), tol.algebraic));
    o.residuals.push(Residual::new("|D-^2|", (&dm.matrix * &dm.matrix).norm(), tol.algebraic));
    o.residuals.push(Residual::new("|D- - (D+)*|", (&dm.matrix - dp.matrix.adjoint()).norm(), tol.algebraic));
    o.residuals.push(Residual::new("D+ grading", dp.verify_grading(), tol.algebraic));
    o.residuals.push(Residual::new("D- grading", dm.verify_grading(), tol.algebraic));
    o.residuals.push(Residual::new("SL formula", sl_residual(&space)?, tol.dual_assembly));
    for ell in admissible_weights(model.m) {
        let r = dl_residual(&space, ell)?;
        o.residuals.push(Residual::new(format!("D_l formula l={ell}"), r.residual, tol.dual_assembly));
    }
    for (q, d) in dirac_kohn_defect(&space)?.into_iter().enumerate() {
        o.residuals.push(Residual::new(format!("|D^2 - 2 Box| q={q}"), d, tol.dual_assembly));
    }
    o.residuals.push(Residual::new("|D+ - sqrt2 dbar|", bijection_defect(&space)?, tol.algebraic));
    for (q, d) in sector_identity_defect(&space).into_iter().enumerate() {
        o.residuals.push(Residual::new(format!("|Box - Boxbar - (m-q)N| q={q}"), d, tol.dual_assembly));
    }
    let t1 = assemble_nabla_t(&space)?.matrix;
    let t2 = assemble_nabla_t_formula(&space)?.matrix;
    o.residuals.push(Residual::new("nabla_T two ways", (t1 - t2).norm(), tol.dual_assembly));
    let c = contraction(&space);
    for q in 0..=model.m {
        let p = assemble_twistor(&space, q)?.matrix;
        o.residuals.push(Residual::new(format!("|c P| q={q}"), (&c * p).norm(), tol.algebraic));
    }
    Ok(o)
}

fn spectrum(ctx: &Ctx) -> Result<Outcome> {
    let tol = &ctx.cfg.tolerances;
    let space = SectionSpace::new(&ctx.model)?;
    let mut o = Outcome::new();
    let d = assemble_kohn_dirac(&space)?;
    o.residuals.push(Residual::new("D_theta Hermitian defect", d.hermitian_defect(), tol.dual_assembly));
    let d2 = assemble_dirac_squared(&space)?;
    let rows = block_spectrum(&d2, ctx.cfg.spectrum.count)?;
    let mut mtx = Vec::new();
    let comment = format!("D_theta, {} m={} sector {}, dim {}", ctx.model.kind.name(), ctx.model.m, space.sector(), space.dim());
    write_matrix_market(&mut mtx, &d.matrix, &comment)?;
    o.files.push(("kohn_dirac.mtx".into(), String::from_utf8(mtx).expect("ascii output")));
    let table: Vec<Value> =
        rows.iter().map(|(q, c)| json!({"q": q, "eigenvalue": c.eigenvalue, "multiplicity": c.multiplicity})).collect();
    match ctx.format {
        OutputFormat::Csv => o.files.push(("spectra.csv".into(), spectrum_csv(&rows))),
        OutputFormat::Json => o.files.push(("spectra.json".into(), to_json(&table)?)),
    }
    o.data = json!({"operator": "D_theta^2", "sector": space.sector(), "dim": space.dim(), "spectrum": table});
    Ok(o)
}

fn cohomology(ctx: &Ctx) -> Result<Outcome> {
    let tol = &ctx.cfg.tolerances;
    let model = &ctx.model;
    let m = model.m;
    let qs: Vec<usize> = (0..=m).collect();
    let table = shift_table(model, &qs, &ctx.cfg.sector_list(), tol.spectral)?;
    let mut o = Outcome::new();
    o.residuals.push(Residual::new("max |Box - Boxbar - (m-q)N|", table.max_identity_defect(), tol.dual_assembly));
    let dis = table.disagreements();
    o.residuals.push(Residual::flag(format!("analytic = spectral ({} disagreements)", dis.len()), dis.is_empty()));
    let space = SectionSpace::new(model)?;
    let spin = harmonic_spinor_table(&space, tol.spectral)?;
    let forms = kohn_table(&space, tol.spectral)?;
    o.residuals.push(Residual::flag("spinor side = form side", spin.dims(Method::Spectral) == forms.dims(Method::Spectral)));
    o.warnings.extend(table.warnings.iter().cloned());
    o.warnings.extend(spin.warnings.iter().cloned());
    let obstruction = obstruction_check(model, model.ell, &table).map(|v| v.to_string()).unwrap_or_else(|e| e.to_string());
    match ctx.format {
        OutputFormat::Csv => o.files.push(("cohomology.csv".into(), table.to_csv())),
        OutputFormat::Json => o.files.push(("cohomology.json".into(), to_json(&table)?)),
    }
    o.data = json!({"obstruction": obstruction, "disagreements": dis, "table": table, "spinor_table": spin});
    Ok(o)
}

fn vanishing(ctx: &Ctx) -> Result<Outcome> {
    let model = &ctx.model;
    let report = vanishing_verdicts(model, model.ell)?;
    let mut o = Outcome::new();
    if model.has_section_space() {
        let space = SectionSpace::new(model)?;
        let table = kohn_table(&space, ctx.cfg.tolerances.spectral)?;
        let bad = contradictions(&report, &table);
        o.residuals.push(Residual::flag(format!("no forced zero meets a kernel ({} conflicts)", bad.len()), bad.is_empty()));
    }
    for r in &report.rows {
        if let Some(b) = r.witnesses.proof_bound {
            // the proof bound never exceeds the true minimum of Q^q
            let slack = b - r.witnesses.q_min_eigenvalue;
            o.residuals.push(Residual::new(format!("proof bound q={}", r.q), slack.max(0.0), ctx.cfg.tolerances.algebraic));
        }
    }
    o.files.push(("vanishing.json".into(), to_json(&report)?));
    o.files.push(("vanishing.txt".into(), report.to_table()));
    o.data = serde_json::to_value(&report)?;
    Ok(o)
}

fn conformal(ctx: &Ctx) -> Result<Outcome> {
    let c = &ctx.cfg.conformal;
    let tol = ctx.cfg.tolerances.conformal;
    let mut o = Outcome::new();
    let mut reports = Vec::new();
    for text in &c.scales {
        let f = ConformalScale::parse(ctx.model.m, text)?;
        let r = conformal_check(&ctx.model, ctx.model.ell, &f, c.points, c.seed)?;
        o.residuals.push(Residual::new(format!("covariance defect f={text}"), r.max_defect(), tol));
        let rejects = r.scans.iter().all(|s| s.rejects_perturbations(1e3 * tol));
        o.residuals.push(Residual::flag(format!("exponent scan rejects perturbations f={text}"), rejects));
        reports.push(json!({"scale": text, "report": r}));
    }
    o.data = Value::Array(reports);
    Ok(o)
}

fn run_check(ctx: &Ctx, name: CheckName, strict: bool) -> (CheckReport, Vec<(String, String)>) {
    let result = match name {
        CheckName::Identities => identities(ctx),
        CheckName::Spectrum => spectrum(ctx),
        CheckName::Cohomology => cohomology(ctx),
        CheckName::Vanishing => vanishing(ctx),
        CheckName::Conformal => conformal(ctx),
    };
    let base = |passed, error, o: Outcome| {
        let artifacts = o.files.iter().map(|(n, _)| n.clone()).collect();
        let report = CheckReport {
            check: name.as_str().into(),
            model: ctx.model.kind.name().into(),
            m: ctx.model.m,
            ell: ctx.model.ell,
            passed,
            error,
            residuals: o.residuals,
            warnings: o.warnings,
            artifacts,
            data: o.data,
        };
        (report, o.files)
    };
    match result {
        Ok(o) => {
            let ok = o.residuals.iter().all(|r| r.passed) && !(strict && !o.warnings.is_empty());
            base(ok, None, o)
        }
        Err(e) => base(false, Some(e.to_string()), Outcome::new()),
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::write(dir.join(name), contents).map_err(Error::from)
}

/// Runs the configured checks and writes one JSON report per check plus
/// its tables into the output directory.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunSummary> {
    let model = cfg.build_model()?;
    let format = opts.format.unwrap_or(cfg.output.format);
    let out_dir = opts.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    let mut checks = opts.checks.clone().unwrap_or_else(|| cfg.checks.run.clone());
    checks.sort();
    checks.dedup();
    let ctx = Ctx { cfg, model, format };
    let results: Vec<_> = checks.par_iter().map(|&c| run_check(&ctx, c, opts.strict)).collect();
    std::fs::create_dir_all(&out_dir)?;
    let mut reports = Vec::new();
    for (report, files) in results {
        for (name, contents) in &files {
            write(&out_dir, name, contents)?;
        }
        write(&out_dir, &format!("report_{}.json", report.check), &to_json(&report)?)?;
        reports.push(report);
    }
    Ok(RunSummary { out_dir, reports })
}
