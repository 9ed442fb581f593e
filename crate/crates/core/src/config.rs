//! Run configuration in TOML.
//!
//! ```toml
//! [model]
//! kind = "torus-bundle"    # heisenberg | torus-bundle | sphere
//! m = 2
//! ell = 0
//! c = 1                    # flux (torus-bundle)
//! s = 0                    # sector of the model (k for heisenberg)
//! aspect = [1.0, 1.0]      # optional lattice aspect ratios
//! scal = 1.0               # sphere normalization
//! sectors = [-1, 0, 1]     # sectors for cohomology tables
//!
//! [truncation]
//! modes = 1
//! levels = 6
//! shell_tol = 1e-8
//! sectors = 2
//!
//! [checks]
//! run = ["identities", "spectrum", "cohomology", "vanishing", "conformal"]
//!
//! [tolerances]
//! algebraic = 1e-12
//! dual_assembly = 1e-10
//! spectral = 1e-8
//! conformal = 1e-9
//!
//! [spectrum]
//! count = 12
//!
//! [conformal]
//! scales = ["0.3*cos(x1)"]
//! points = 20
//! seed = 7
//!
//! [output]
//! dir = "out"
//! format = "csv"           # csv | json
//! ```
//!
//! Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{
    cr_alpha_bundle_with, heisenberg_model, sphere_model_with_scal, PseudoHermitianModel, TorusLattice, TruncationSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKindName {
    Heisenberg,
    TorusBundle,
    Sphere,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKindName,
    pub m: usize,
    #[serde(default)]
    pub ell: i64,
    #[serde(default = "one")]
    pub c: i64,
    #[serde(default)]
    pub s: i64,
    #[serde(default)]
    pub aspect: Option<Vec<f64>>,
    #[serde(default = "unit_scal")]
    pub scal: f64,
    #[serde(default)]
    pub sectors: Option<Vec<i64>>,
}

fn one() -> i64 {
    1
}

fn unit_scal() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckName {
    Identities,
    Spectrum,
    Cohomology,
    Vanishing,
    Conformal,
}

impl CheckName {
    pub const ALL: [CheckName; 5] =
        [CheckName::Identities, CheckName::Spectrum, CheckName::Cohomology, CheckName::Vanishing, CheckName::Conformal];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Identities => "identities",
            CheckName::Spectrum => "spectrum",
            CheckName::Cohomology => "cohomology",
            CheckName::Vanishing => "vanishing",
            CheckName::Conformal => "conformal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checks {
    pub run: Vec<CheckName>,
}

impl Default for Checks {
    fn default() -> Self {
        Checks { run: vec![CheckName::Identities] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub algebraic: f64,
    pub dual_assembly: f64,
    pub spectral: f64,
    pub conformal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { algebraic: 1e-12, dual_assembly: 1e-10, spectral: 1e-8, conformal: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumOptions {
    /// Lowest eigenvalues reported per degree (0: all).
    pub count: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { count: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConformalOptions {
    pub scales: Vec<String>,
    pub points: usize,
    pub seed: u64,
}

impl Default for ConformalOptions {
    fn default() -> Self {
        ConformalOptions { scales: vec!["0.3*cos(x1)".into()], points: 20, seed: 7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputOptions {
    pub dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions { dir: PathBuf::from("out"), format: OutputFormat::Csv }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub truncation: TruncationSpec,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub spectrum: SpectrumOptions,
    #[serde(default)]
    pub conformal: ConformalOptions,
    #[serde(default)]
    pub output: OutputOptions,
}

/// Line of `key = …` inside `[table]`, 1-based.
fn locate(src: &str, table: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, line) in src.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = name.trim().to_string();
        } else if current == table {
            if let Some((k, _)) = t.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

fn invalid(src: &str, table: &str, key: &str, msg: String) -> Error {
    match locate(src, table, key) {
        Some(line) => Error::Config(format!("line {line}, key `{table}.{key}`: {msg}")),
        None => Error::Config(format!("key `{table}.{key}`: {msg}")),
    }
}

impl RunConfig {
    /// Parses and validates TOML text.
    pub fn parse(src: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(src).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        cfg.validate(src)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)?;
        Self::parse(&src).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn validate(&self, src: &str) -> Result<()> {
        let t = &self.tolerances;
        for (key, v) in [("algebraic", t.algebraic), ("dual_assembly", t.dual_assembly), ("spectral", t.spectral), ("conformal", t.conformal)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(src, "tolerances", key, format!("tolerance must be positive, got {v}")));
            }
        }
        if !(self.truncation.shell_tol > 0.0 && self.truncation.shell_tol.is_finite()) {
            return Err(invalid(src, "truncation", "shell_tol", "must be positive".into()));
        }
        for key in ["modes", "levels"] {
            let v = if key == "modes" { self.truncation.modes } else { self.truncation.levels };
            if v == 0 {
                return Err(invalid(src, "truncation", key, "must be at least 1".into()));
            }
        }
        if self.model.m == 0 {
            return Err(invalid(src, "model", "m", "CR dimension must be at least 1".into()));
        }
        if let Some(a) = &self.model.aspect {
            if a.len() != self.model.m {
                return Err(invalid(src, "model", "aspect", format!("expected {} aspect ratios, got {}", self.model.m, a.len())));
            }
        }
        if let Some(s) = &self.model.sectors {
            if let Some(bad) = s.iter().find(|s| s.unsigned_abs() as usize > self.truncation.sectors) {
                return Err(invalid(
                    src,
                    "model",
                    "sectors",
                    format!("sector {bad} lies outside the window |s| <= {}", self.truncation.sectors),
                ));
            }
        }
        if self.model.kind == ModelKindName::TorusBundle && self.model.c == 0 {
            return Err(invalid(src, "model", "c", "flux must be nonzero".into()));
        }
        if self.checks.run.is_empty() {
            return Err(invalid(src, "checks", "run", "no checks requested".into()));
        }
        if self.conformal.points == 0 {
            return Err(invalid(src, "conformal", "points", "must be at least 1".into()));
        }
        Ok(())
    }

    /// Builds the configured model with `ell` applied.
    pub fn build_model(&self) -> Result<PseudoHermitianModel> {
        let s = &self.model;
        let model = match s.kind {
            ModelKindName::Heisenberg => heisenberg_model(s.m, s.s, self.truncation)?,
            ModelKindName::TorusBundle => {
                let lattice = match &s.aspect {
                    Some(a) => TorusLattice { aspect: a.clone() },
                    None => TorusLattice::square(s.m),
                };
                cr_alpha_bundle_with(lattice, s.c, s.s, self.truncation)?
            }
            ModelKindName::Sphere => sphere_model_with_scal(s.m, s.scal)?,
        };
        Ok(model.with_ell(s.ell))
    }

    /// Sectors scanned by cohomology tables.
    pub fn sector_list(&self) -> Vec<i64> {
        match &self.model.sectors {
            Some(s) => s.clone(),
            None => {
                let w = self.truncation.sectors as i64;
                (-w..=w).collect()
            }
        }
    }
}
