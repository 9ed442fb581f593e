//! Vanishing theorems for harmonic spinors and twisted Kohn–Rossi groups,
//! evaluated clause by clause on homogeneous model data.
//!
//! On homogeneous models "`ρ_θ ≢ 0` semidefinite" means every eigenvalue of
//! the matrix `r` has one sign and at least one is nonzero, and
//! "`scal ≥ 0`, positive somewhere" means `scal > 0`.

use std::fmt::{self, Write as _};

use num_rational::Rational64;
use serde::Serialize;

use crate::clifford::mu;
use crate::cohomology::{CohomologyTable, Status};
use crate::error::{Error, Result};
use crate::models::PseudoHermitianModel;
use crate::weitzenboeck::{curvature_term, q_lower_bound};

/// Eigenvalues of `r` within this distance of zero count as zero.
const SIGN_TOL: f64 = 1e-12;

/// `q̂ = m(m+ℓ+2)/(2(m+2))`.
pub fn qhat(m: usize, ell: i64) -> Rational64 {
    let m = m as i64;
    Rational64::new(m * (m + ell + 2), 2 * (m + 2))
}

/// Whether a spin^C structure of weight `p` exists: `E(1)` has a square
/// root, or `m` and `p` are both odd, or both even.
pub fn spin_c_exists(m: usize, p: i64, has_square_root: bool) -> bool {
    has_square_root || (m as i64 - p) % 2 == 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Clause {
    #[serde(rename = "vani-a1")]
    VaniA1,
    #[serde(rename = "vani-a2")]
    VaniA2,
    #[serde(rename = "vani-a3")]
    VaniA3,
    #[serde(rename = "vani-b")]
    VaniB,
    #[serde(rename = "vani-c")]
    VaniC,
    #[serde(rename = "VanKR-1")]
    VanKr1,
    #[serde(rename = "VanKR-2")]
    VanKr2,
    #[serde(rename = "VanKR-3")]
    VanKr3,
    #[serde(rename = "VanKR-4")]
    VanKr4,
    #[serde(rename = "ObsKR")]
    ObsKr,
    #[serde(rename = "RegVan-a")]
    RegVanA,
}

impl Clause {
    pub const ALL: [Clause; 11] = [
        Clause::VaniA1,
        Clause::VaniA2,
        Clause::VaniA3,
        Clause::VaniB,
        Clause::VaniC,
        Clause::VanKr1,
        Clause::VanKr2,
        Clause::VanKr3,
        Clause::VanKr4,
        Clause::ObsKr,
        Clause::RegVanA,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Clause::VaniA1 => "vani-a1",
            Clause::VaniA2 => "vani-a2",
            Clause::VaniA3 => "vani-a3",
            Clause::VaniB => "vani-b",
            Clause::VaniC => "vani-c",
            Clause::VanKr1 => "VanKR-1",
            Clause::VanKr2 => "VanKR-2",
            Clause::VanKr3 => "VanKR-3",
            Clause::VanKr4 => "VanKR-4",
            Clause::ObsKr => "ObsKR",
            Clause::RegVanA => "RegVan-a",
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Forced to vanish by `clause`; `also` lists every other clause that
    /// applies.
    ForcedZero { clause: Clause, also: Vec<Clause> },
    NotForced,
    ExtremalExempt,
}

impl Verdict {
    pub fn is_forced(&self) -> bool {
        matches!(self, Verdict::ForcedZero { .. })
    }

    pub fn label(&self) -> String {
        match self {
            Verdict::ForcedZero { clause, .. } => format!("forced_zero({clause})"),
            Verdict::NotForced => "not_forced".into(),
            Verdict::ExtremalExempt => "extremal_exempt".into(),
        }
    }
}

/// Inequality values used to decide one row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witnesses {
    pub mu: i64,
    /// `−mℓ/(m+2)`.
    pub threshold: f64,
    /// `(m+2−ℓ) scal^W`.
    pub upper_margin: f64,
    /// `(m+2+ℓ) scal^W`.
    pub lower_margin: f64,
    /// Smallest eigenvalue of `Q^q`.
    pub q_min_eigenvalue: f64,
    /// Cauchy–Schwarz bound on `Q^q` for semidefinite `ρ_θ`.
    pub proof_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingRow {
    pub q: usize,
    pub verdict: Verdict,
    pub witnesses: Witnesses,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingReport {
    pub model: String,
    pub m: usize,
    pub ell: i64,
    pub scal: f64,
    pub rho_eigenvalues: Vec<f64>,
    pub qhat: String,
    pub qhat_integral: bool,
    /// Circle-bundle clauses not evaluated for lack of flags.
    pub skipped: Vec<Clause>,
    pub rows: Vec<VanishingRow>,
}

impl VanishingReport {
    pub fn row(&self, q: usize) -> Option<&VanishingRow> {
        self.rows.iter().find(|r| r.q == q)
    }

    /// Plain-text table, one line per degree.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model {}  m = {}  l = {}  scal = {:e}  qhat = {}", self.model, self.m, self.ell, self.scal, self.qhat);
        let _ = writeln!(out, "{:>3}  {:>4}  {:<24}  {:>13}  also", "q", "mu", "verdict", "min Q^q");
        for r in &self.rows {
            let also = match &r.verdict {
                Verdict::ForcedZero { also, .. } => also.iter().map(|c| c.name()).collect::<Vec<_>>().join(","),
                _ => String::new(),
            };
            let _ = writeln!(out, "{:>3}  {:>4}  {:<24}  {:>13.6e}  {}", r.q, r.witnesses.mu, r.verdict.label(), r.witnesses.q_min_eigenvalue, also);
        }
        out
    }
}

fn hermitian_eigenvalues(model: &PseudoHermitianModel) -> Vec<f64> {
    let mut e: Vec<f64> = model.rho.clone().symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(|a, b| a.total_cmp(b));
    e
}

struct Data {
    m: i64,
    ell: i64,
    scal_pos: bool,
    nonzero: bool,
    pos_semi: bool,
    neg_semi: bool,
    pos_def: bool,
    qhat: Rational64,
    circle_bundle: bool,
}

impl Data {
    fn applies(&self, clause: Clause, q: usize) -> bool {
        let (m, ell) = (self.m, self.ell);
        let mu_q = mu(m as usize, q);
        // μ_q compared with −mℓ/(m+2) exactly: (m+2)μ_q vs −mℓ
        let lhs = (m + 2) * mu_q;
        let rhs = -m * ell;
        let semi = self.pos_semi || self.neg_semi;
        let mid = q >= 1 && (q as i64) < m;
        let at_qhat = self.qhat.is_integer() && *self.qhat.numer() == q as i64;
        let inside = ell.abs() < m + 2;
        match clause {
            Clause::VaniA1 => mid && lhs == rhs && self.scal_pos,
            Clause::VaniA2 => mid && lhs > rhs && semi && (m + 2 - ell) > 0 && self.scal_pos,
            Clause::VaniA3 => mid && lhs < rhs && semi && (m + 2 + ell) > 0 && self.scal_pos,
            Clause::VaniB => mid && ell.abs() > m + 2 && self.nonzero && self.neg_semi,
            Clause::VaniC => mid && inside && self.nonzero && self.pos_semi,
            Clause::VanKr1 => m >= 2 && mid && self.nonzero && self.neg_semi && ell.abs() > m + 2,
            Clause::VanKr2 => m >= 2 && mid && self.nonzero && self.pos_semi && inside,
            // ℓ = m+2 is the trivial twist; ℓ = −(m+2) follows by spinor conjugation
            Clause::VanKr3 => m >= 2 && mid && self.pos_def && ell.abs() == m + 2,
            Clause::VanKr4 => m >= 2 && ell == 0 && m % 2 == 0 && q as i64 == m / 2 && self.scal_pos,
            Clause::ObsKr => m >= 2 && inside && at_qhat && self.scal_pos,
            Clause::RegVanA => self.circle_bundle && m >= 2 && inside && at_qhat && self.scal_pos,
        }
    }
}

/// Verdict per degree `q ∈ {0, …, m}` for weight `ell`.
pub fn vanishing_verdicts(model: &PseudoHermitianModel, ell: i64) -> Result<VanishingReport> {
    let rho_eigenvalues = hermitian_eigenvalues(model);
    let circle_bundle = model.flags.regular && model.flags.torsion_free;
    let data = Data {
        m: model.m as i64,
        ell,
        scal_pos: model.scal > SIGN_TOL,
        nonzero: rho_eigenvalues.iter().any(|e| e.abs() > SIGN_TOL),
        pos_semi: rho_eigenvalues.iter().all(|&e| e >= -SIGN_TOL),
        neg_semi: rho_eigenvalues.iter().all(|&e| e <= SIGN_TOL),
        pos_def: rho_eigenvalues.iter().all(|&e| e > SIGN_TOL),
        qhat: qhat(model.m, ell),
        circle_bundle,
    };
    let m = model.m;
    let (mf, lf) = (m as f64, ell as f64);
    let mut rows = Vec::new();
    for q in 0..=m {
        let term = curvature_term(model, ell, q)?;
        let semi = data.pos_semi || data.neg_semi;
        let witnesses = Witnesses {
            mu: mu(m, q),
            threshold: -mf * lf / (mf + 2.0),
            upper_margin: (mf + 2.0 - lf) * model.scal,
            lower_margin: (mf + 2.0 + lf) * model.scal,
            q_min_eigenvalue: term.min_eigenvalue(),
            proof_bound: semi.then(|| q_lower_bound(m, ell, q, model.scal)),
        };
        let applicable: Vec<Clause> = Clause::ALL.iter().copied().filter(|c| data.applies(*c, q)).collect();
        let verdict = if q == 0 || q == m {
            Verdict::ExtremalExempt
        } else if let Some((&first, rest)) = applicable.split_first() {
            Verdict::ForcedZero { clause: first, also: rest.to_vec() }
        } else {
            Verdict::NotForced
        };
        rows.push(VanishingRow { q, verdict, witnesses });
    }
    let q = data.qhat;
    Ok(VanishingReport {
        model: model.kind.name().into(),
        m,
        ell,
        scal: model.scal,
        rho_eigenvalues,
        qhat: if q.is_integer() { q.numer().to_string() } else { format!("{}/{}", q.numer(), q.denom()) },
        qhat_integral: q.is_integer(),
        skipped: if circle_bundle { Vec::new() } else { vec![Clause::RegVanA] },
        rows,
    })
}

/// As [`vanishing_verdicts`], but requires the circle-bundle flags so that
/// `RegVan-a` is evaluated.
pub fn circle_bundle_verdicts(model: &PseudoHermitianModel, ell: i64) -> Result<VanishingReport> {
    if !(model.flags.regular && model.flags.torsion_free) {
        return Err(Error::MissingFlags("RegVan-a needs a regular, torsion-free circle bundle".into()));
    }
    vanishing_verdicts(model, ell)
}

/// Degrees where a forced zero meets a nonzero spectral kernel in `table`.
pub fn contradictions(report: &VanishingReport, table: &CohomologyTable) -> Vec<(usize, i64)> {
    table
        .entries
        .iter()
        .filter(|e| e.dim > 0 && report.row(e.q).is_some_and(|r| r.verdict.is_forced()))
        .map(|e| (e.q, e.s))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Obstruction {
    /// No adapted `θ` with `scal^W > 0` exists on this CR structure.
    Obstructed { q: usize, s: i64, dim: u64 },
    NotObstructed,
    NoVerdict { reason: String },
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::Obstructed { q, s, dim } => write!(
                f,
                "obstructed: h^{q} = {dim} in sector {s}; no theta with scal^W > 0 exists on this CR structure"
            ),
            Obstruction::NotObstructed => f.write_str("not obstructed"),
            Obstruction::NoVerdict { reason } => write!(f, "no verdict: {reason}"),
        }
    }
}

/// Reads the degree-`q̂` entries of a cohomology table.
pub fn obstruction_check(model: &PseudoHermitianModel, ell: i64, table: &CohomologyTable) -> Result<Obstruction> {
    let m = model.m;
    if table.m != m {
        return Err(Error::DimensionMismatch { expected: m, found: table.m });
    }
    if m < 2 {
        return Ok(Obstruction::NoVerdict { reason: "needs m >= 2".into() });
    }
    if ell.abs() >= m as i64 + 2 {
        return Ok(Obstruction::NoVerdict { reason: format!("|l| = {} is not below m + 2", ell.abs()) });
    }
    let qh = qhat(m, ell);
    if !qh.is_integer() {
        return Ok(Obstruction::NoVerdict { reason: format!("qhat = {}/{} is not an integer", qh.numer(), qh.denom()) });
    }
    let q = *qh.numer() as usize;
    let entries: Vec<_> = table.entries.iter().filter(|e| e.q == q).collect();
    if let Some(e) = entries.iter().find(|e| e.dim > 0 && e.status == Status::Certified) {
        return Ok(Obstruction::Obstructed { q, s: e.s, dim: e.dim });
    }
    if entries.iter().any(|e| e.status != Status::Certified) {
        return Err(Error::Uncertified { q });
    }
    Ok(Obstruction::NotObstructed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{heisenberg_model, sphere_model, TruncationSpec};

    #[test]
    fn qhat_examples() {
        assert_eq!(qhat(4, -3), Rational64::from_integer(1));
        assert_eq!(qhat(2, 0), Rational64::from_integer(1));
        assert_eq!(qhat(3, 0), Rational64::new(3, 2));
    }

    #[test]
    fn spin_c_existence() {
        assert!(spin_c_exists(3, 1, false));
        assert!(spin_c_exists(2, 2, false));
        assert!(!spin_c_exists(2, 1, false));
        assert!(spin_c_exists(2, 1, true));
    }

    #[test]
    fn sphere_middle_degrees_forced() {
        let r = vanishing_verdicts(&sphere_model(3).unwrap(), 0).unwrap();
        assert_eq!(r.rows[0].verdict, Verdict::ExtremalExempt);
        assert_eq!(r.rows[3].verdict, Verdict::ExtremalExempt);
        assert!(r.rows[1].verdict.is_forced() && r.rows[2].verdict.is_forced());
        let r = vanishing_verdicts(&sphere_model(2).unwrap(), 4).unwrap();
        assert!(matches!(r.rows[1].verdict, Verdict::ForcedZero { clause: Clause::VanKr3, .. }));
    }

    #[test]
    fn flat_never_forced() {
        let h = heisenberg_model(2, 0, TruncationSpec::default()).unwrap();
        for ell in -5..=5 {
            let r = vanishing_verdicts(&h, ell).unwrap();
            assert!(r.rows.iter().all(|row| !row.verdict.is_forced()));
        }
    }
}
