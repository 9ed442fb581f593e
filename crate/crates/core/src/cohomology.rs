//! Twisted Kohn–Rossi cohomology of the flat models, computed analytically
//! through the circle-bundle shift and spectrally from operator kernels.
//!
//! `(0,q)`-forms `Ē*^S ⊗ (mode)` use the same basis order as spinors, so a
//! form space and a section space share their index map. Wedge with `Ē*_α`
//! and interior product with `Ē_α` carry the Koszul sign
//! `(−1)^{#{β ∈ S : β < α}}`.
//!
//! Two fibre metrics are used on forms:
//!
//! * `Webster`: `|Ē*_α|² = 2`, for which `D_θ² = 2□` under the isometry
//!   `Φ = 2^{q/2}` on degree `q`;
//! * `Levi`: `|Ē*_α|² = 1`, for which `∂̄* = −Σ ι_{Ē_α}∇_{E_α}` and
//!   `□ − □̄ = (m−q)𝒩` on every sector.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use nalgebra_sparse::CscMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{binomial, C64};
use crate::error::{Error, Result};
use crate::models::{ModelKind, PseudoHermitianModel, TorusLattice};
use crate::operators::{
    assemble_dirac_squared, assemble_dplus, assemble_kohn_dirac, kernel_dim_on, Assembler, KernelBlock,
    OperatorMatrix, SectionSpace,
};

/// Normalization of the fibre metric on `(0,q)`-forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormMetric {
    Webster,
    Levi,
}

impl FormMetric {
    /// Factor multiplying `−Σ ι_{Ē_α}∇_{E_α}` in `∂̄*`.
    fn adjoint_factor(self) -> f64 {
        match self {
            FormMetric::Webster => 2.0,
            FormMetric::Levi => 1.0,
        }
    }
}

fn dbar_sparse(a: &Assembler) -> CscMatrix<C64> {
    let m = a.basis.m();
    a.build(|sp, md, out| {
        for al in 0..m {
            let Some((to, sign)) = a.basis.ladder(true, al + 1, sp) else { continue };
            if let Some((p, c)) = a.deriv(false, al, md) {
                out.push((a.idx(to, p), c * sign));
            }
        }
    })
}

fn dbar_star_sparse(a: &Assembler, metric: FormMetric) -> CscMatrix<C64> {
    let m = a.basis.m();
    let w = metric.adjoint_factor();
    a.build(|sp, md, out| {
        for al in 0..m {
            // ladder(false) carries −(Koszul sign); ι_{Ē_α} carries +(Koszul sign)
            let Some((to, neg_koszul)) = a.basis.ladder(false, al + 1, sp) else { continue };
            if let Some((p, c)) = a.deriv(true, al, md) {
                out.push((a.idx(to, p), c * (w * neg_koszul)));
            }
        }
    })
}

fn square(name: &str, space: &SectionSpace, matrix: DMatrix<C64>, shifts: &[i64]) -> OperatorMatrix {
    OperatorMatrix { name: name.into(), matrix, domain: space.layout(), codomain: space.layout(), grade_shifts: shifts.to_vec() }
}

/// `∂̄ = Σ Ē*_α ∧ ∇_{Ē_α}` on `(0,•)`-forms.
pub fn dbar(space: &SectionSpace) -> OperatorMatrix {
    square("dbar", space, space.dense(&dbar_sparse(&space.core())), &[1])
}

/// `∂̄*` for the given fibre metric.
pub fn dbar_star(space: &SectionSpace, metric: FormMetric) -> OperatorMatrix {
    square("dbar*", space, space.dense(&dbar_star_sparse(&space.core(), metric)), &[-1])
}

/// `□ = ∂̄*∂̄ + ∂̄∂̄*` in the Webster normalization.
pub fn kohn_laplacian(space: &SectionSpace) -> OperatorMatrix {
    kohn_laplacian_with(space, FormMetric::Webster)
}

pub fn kohn_laplacian_with(space: &SectionSpace, metric: FormMetric) -> OperatorMatrix {
    let b = space.buffered();
    let d = dbar_sparse(&b);
    let ds = dbar_star_sparse(&b, metric);
    let one = C64::new(1.0, 0.0);
    let m = space.composite(&[(one, ds.clone(), d.clone()), (one, d, ds)]);
    square("Kohn Laplacian", space, m, &[0])
}

/// `□̄ = −w Σ ∇_{Ē_α}∇_{E_α}` with `w` the metric factor.
pub fn kohn_laplacian_bar(space: &SectionSpace, metric: FormMetric) -> OperatorMatrix {
    let b = space.buffered();
    let w = C64::new(-metric.adjoint_factor(), 0.0);
    let terms: Vec<_> = (0..space.m()).map(|a| (w, b.nabla(false, a), b.nabla(true, a))).collect();
    square("conjugate Kohn Laplacian", space, space.composite(&terms), &[0])
}

/// The isometry `Φ = 2^{q/2}` from Webster-normalized forms to spinors.
pub fn form_to_spinor(space: &SectionSpace) -> DMatrix<C64> {
    DMatrix::from_fn(space.dim(), space.dim(), |r, c| {
        if r == c {
            C64::new(2f64.powf(space.grade_of(r) as f64 / 2.0), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn conjugate(phi: &DMatrix<C64>, a: &DMatrix<C64>) -> DMatrix<C64> {
    let inv = DMatrix::from_fn(phi.nrows(), phi.ncols(), |r, c| if r == c { phi[(r, c)].inv() } else { phi[(r, c)] });
    phi * a * inv
}

/// `‖D₊ − √2 Φ∂̄Φ⁻¹‖`: the basis bijection intertwines `D₊` and `∂̄`.
pub fn bijection_defect(space: &SectionSpace) -> Result<f64> {
    let phi = form_to_spinor(space);
    let dp = assemble_dplus(space)?.matrix;
    let d = conjugate(&phi, &dbar(space).matrix) * C64::new(2f64.sqrt(), 0.0);
    Ok((dp - d).norm())
}

/// `‖D_θ² − 2Φ□Φ⁻¹‖` per degree, Webster normalization.
pub fn dirac_kohn_defect(space: &SectionSpace) -> Result<Vec<f64>> {
    let phi = form_to_spinor(space);
    let d2 = assemble_dirac_squared(space)?.matrix;
    let lap = conjugate(&phi, &kohn_laplacian(space).matrix) * C64::new(2.0, 0.0);
    let diff = d2 - lap;
    Ok((0..=space.m())
        .map(|q| {
            let r = space.block(q);
            diff.view((r.start, r.start), (r.len(), r.len())).norm()
        })
        .collect())
}

/// `‖□ − □̄ − (m−q)𝒩‖` per degree, Levi normalization.
pub fn sector_identity_defect(space: &SectionSpace) -> Vec<f64> {
    let lap = kohn_laplacian_with(space, FormMetric::Levi).matrix;
    let bar = kohn_laplacian_bar(space, FormMetric::Levi).matrix;
    let m = space.m();
    let lambda = space.n_eigenvalue();
    let diff = lap - bar;
    (0..=m)
        .map(|q| {
            let r = space.block(q);
            let shift = DMatrix::from_diagonal_element(r.len(), r.len(), C64::new((m - q) as f64 * lambda, 0.0));
            (diff.view((r.start, r.start), (r.len(), r.len())) - shift).norm()
        })
        .collect()
}

/// `h^q(N, L^s)` for the line bundle `L` of first Chern class `c` times the
/// principal polarization on the flat torus `N = C^m/Λ`.
pub fn torus_line_bundle_cohomology(lattice: &TorusLattice, c: i64, s: i64, q: usize) -> Result<u64> {
    lattice.validate()?;
    let m = lattice.m();
    if q > m {
        return Err(Error::GradeOutOfRange { q, m });
    }
    let d = s * c;
    Ok(match d.signum() {
        0 => binomial(m, q) as u64,
        1 if q == 0 => d.unsigned_abs().pow(m as u32),
        -1 if q == m => d.unsigned_abs().pow(m as u32),
        _ => 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Certified,
    LowerBound,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Spectral => "spectral",
        }
    }
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::LowerBound => "lower-bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyEntry {
    pub q: usize,
    pub s: i64,
    pub dim: u64,
    pub method: Method,
    pub status: Status,
    pub note: String,
}

/// Per-sector identity defects recorded while building a table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorDefect {
    pub s: i64,
    pub q: usize,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohomologyTable {
    pub model: String,
    pub m: usize,
    pub entries: Vec<CohomologyEntry>,
    pub identity_defects: Vec<SectorDefect>,
    /// Kernel vectors with intermediate top-shell amplitude.
    pub warnings: Vec<String>,
}

impl CohomologyTable {
    fn new(model: &PseudoHermitianModel) -> Self {
        CohomologyTable { model: model.kind.name().into(), m: model.m, entries: Vec::new(), identity_defects: Vec::new(), warnings: Vec::new() }
    }

    pub fn get(&self, q: usize, s: i64, method: Method) -> Option<&CohomologyEntry> {
        self.entries.iter().find(|e| e.q == q && e.s == s && e.method == method)
    }

    /// Dimensions as `(q, s, dim)`, sorted.
    pub fn dims(&self, method: Method) -> Vec<(usize, i64, u64)> {
        let mut v: Vec<_> = self.entries.iter().filter(|e| e.method == method).map(|e| (e.q, e.s, e.dim)).collect();
        v.sort();
        v
    }

    pub fn max_identity_defect(&self) -> f64 {
        self.identity_defects.iter().map(|d| d.defect).fold(0.0, f64::max)
    }

    /// `(q, s)` pairs where the analytic and spectral entries differ.
    pub fn disagreements(&self) -> Vec<(usize, i64)> {
        self.entries
            .iter()
            .filter(|e| e.method == Method::Spectral)
            .filter_map(|e| self.get(e.q, e.s, Method::Analytic).filter(|a| a.dim != e.dim).map(|_| (e.q, e.s)))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,s,dim,method,status\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{},{},{}", e.q, e.s, e.dim, e.method.as_str(), e.status.as_str());
        }
        out
    }
}

fn status(m: usize, q: usize) -> Status {
    if q == 0 || q == m {
        Status::LowerBound
    } else {
        Status::Certified
    }
}

fn truncation_note(space: &SectionSpace) -> String {
    if space.modes().is_diagonal() {
        format!("fourier modes={}", space.model().truncation().map_or(0, |t| t.modes))
    } else {
        format!("landau levels<={}", space.model().truncation().map_or(0, |t| t.levels))
    }
}

fn spectral_entries(space: &SectionSpace, blocks: &[KernelBlock], source: &str, table: &mut CohomologyTable) {
    let m = space.m();
    for b in blocks {
        if b.ambiguous > 0 {
            table.warnings.push(format!(
                "sector {}, q = {}: {} kernel vector(s) straddle the truncation shell",
                space.sector(),
                b.q,
                b.ambiguous
            ));
        }
        table.entries.push(CohomologyEntry {
            q: b.q,
            s: space.sector(),
            dim: b.certified as u64 * space.degeneracy(),
            method: Method::Spectral,
            status: status(m, b.q),
            note: format!("{source}; {}", truncation_note(space)),
        });
    }
}

/// Per-degree kernel dimensions of `D_θ`, spinor side.
pub fn harmonic_spinor_table(space: &SectionSpace, tol: f64) -> Result<CohomologyTable> {
    let mut table = CohomologyTable::new(space.model());
    let blocks = kernel_dim_on(space, &assemble_kohn_dirac(space)?, tol)?;
    spectral_entries(space, &blocks, "spinor kernel", &mut table);
    Ok(table)
}

/// Per-degree kernel dimensions of `□`, form side.
pub fn kohn_table(space: &SectionSpace, tol: f64) -> Result<CohomologyTable> {
    let mut table = CohomologyTable::new(space.model());
    let blocks = kernel_dim_on(space, &kohn_laplacian(space), tol)?;
    spectral_entries(space, &blocks, "form kernel", &mut table);
    Ok(table)
}

fn flux(model: &PseudoHermitianModel) -> Result<(TorusLattice, i64, usize)> {
    match &model.kind {
        ModelKind::Heisenberg { truncation, .. } => Ok((TorusLattice::square(model.m), 1, truncation.sectors)),
        ModelKind::TorusBundle { lattice, c, truncation, .. } => Ok((lattice.clone(), *c, truncation.sectors)),
        ModelKind::Sphere => Err(Error::NoSectionSpace("sphere model")),
        ModelKind::Custom => Err(Error::NoSectionSpace("custom model")),
    }
}

/// Analytic and spectral Kohn–Rossi dimensions per characteristic sector.
///
/// Sector `s` has `𝒩 = s·sign(c)` and is identified with `h^q(N, L^{−s})`.
/// The spectral entry is the kernel of `□` on the sector.
pub fn shift_table(model: &PseudoHermitianModel, q_range: &[usize], s_range: &[i64], tol: f64) -> Result<CohomologyTable> {
    let (lattice, c, window) = flux(model)?;
    let m = model.m;
    if let Some(&q) = q_range.iter().find(|&&q| q > m) {
        return Err(Error::GradeOutOfRange { q, m });
    }
    if let Some(&s) = s_range.iter().find(|s| s.unsigned_abs() as usize > window) {
        return Err(Error::SectorOutsideWindow { sector: s });
    }
    let per_sector: Vec<Result<CohomologyTable>> = s_range
        .par_iter()
        .map(|&s| {
            let space = SectionSpace::for_sector(model, s)?;
            let mut t = CohomologyTable::new(model);
            for (q, defect) in sector_identity_defect(&space).into_iter().enumerate() {
                if q_range.contains(&q) {
                    t.identity_defects.push(SectorDefect { s, q, defect });
                }
            }
            let blocks: Vec<KernelBlock> =
                kernel_dim_on(&space, &kohn_laplacian(&space), tol)?.into_iter().filter(|b| q_range.contains(&b.q)).collect();
            spectral_entries(&space, &blocks, "form kernel", &mut t);
            for &q in q_range {
                t.entries.push(CohomologyEntry {
                    q,
                    s,
                    dim: torus_line_bundle_cohomology(&lattice, c, -s, q)?,
                    method: Method::Analytic,
                    status: status(m, q),
                    note: format!("h^q(N, L^{})", -s),
                });
            }
            Ok(t)
        })
        .collect();
    let mut table = CohomologyTable::new(model);
    for t in per_sector {
        let t = t?;
        table.entries.extend(t.entries);
        table.identity_defects.extend(t.identity_defects);
        table.warnings.extend(t.warnings);
    }
    table.entries.sort_by(|a, b| (a.s, a.q, a.method.as_str()).cmp(&(b.s, b.q, b.method.as_str())));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{cr_alpha_bundle_with, heisenberg_model, TruncationSpec};
    use crate::operators::{ALGEBRAIC_TOL, DUAL_ASSEMBLY_TOL, SPECTRAL_TOL};

    fn bundle(m: usize, s: i64) -> PseudoHermitianModel {
        cr_alpha_bundle_with(TorusLattice::square(m), 1, s, TruncationSpec::new(1, 5)).unwrap()
    }

    #[test]
    fn dbar_squares_to_zero_and_adjoint_is_levi_star() {
        for s in [-1, 0, 2] {
            let space = SectionSpace::new(&bundle(2, s)).unwrap();
            let d = dbar(&space).matrix;
            assert!((&d * &d).norm() < ALGEBRAIC_TOL);
            let ds = dbar_star(&space, FormMetric::Levi).matrix;
            assert!((ds - d.adjoint()).norm() < ALGEBRAIC_TOL);
        }
    }

    #[test]
    fn dirac_square_is_twice_kohn() {
        let space = SectionSpace::new(&bundle(2, 1)).unwrap();
        assert!(dirac_kohn_defect(&space).unwrap().iter().all(|&d| d < DUAL_ASSEMBLY_TOL));
        assert!(bijection_defect(&space).unwrap() < ALGEBRAIC_TOL);
    }

    #[test]
    fn sector_identity_holds() {
        for s in [-2, 0, 1] {
            let space = SectionSpace::new(&bundle(2, s)).unwrap();
            assert!(sector_identity_defect(&space).iter().all(|&d| d < DUAL_ASSEMBLY_TOL));
        }
    }

    #[test]
    fn analytic_values() {
        let l = TorusLattice::square(2);
        assert_eq!(torus_line_bundle_cohomology(&l, 1, 0, 1).unwrap(), 2);
        assert_eq!(torus_line_bundle_cohomology(&l, 1, 2, 0).unwrap(), 4);
        assert_eq!(torus_line_bundle_cohomology(&l, 1, 2, 1).unwrap(), 0);
        assert_eq!(torus_line_bundle_cohomology(&l, -1, 3, 2).unwrap(), 9);
        assert!(torus_line_bundle_cohomology(&l, 1, 0, 3).is_err());
    }

    #[test]
    fn flat_kernel_m1() {
        let space = SectionSpace::new(&heisenberg_model(1, 0, TruncationSpec::new(2, 4)).unwrap()).unwrap();
        let t = kohn_table(&space, SPECTRAL_TOL).unwrap();
        assert_eq!(t.dims(Method::Spectral), vec![(0, 0, 1), (1, 0, 1)]);
    }

    #[test]
    fn shift_table_agrees_and_respects_window() {
        let model = bundle(1, 0);
        let t = shift_table(&model, &[0, 1], &[-2, -1, 0, 1, 2], SPECTRAL_TOL).unwrap();
        assert!(t.disagreements().is_empty(), "{t:#?}");
        assert!(t.max_identity_defect() < DUAL_ASSEMBLY_TOL);
        assert!(matches!(shift_table(&model, &[0], &[3], SPECTRAL_TOL), Err(Error::SectorOutsideWindow { sector: 3 })));
    }

    #[test]
    fn spinor_and_form_tables_match() {
        let space = SectionSpace::new(&bundle(2, -1)).unwrap();
        let a = harmonic_spinor_table(&space, SPECTRAL_TOL).unwrap();
        let b = kohn_table(&space, SPECTRAL_TOL).unwrap();
        assert_eq!(a.dims(Method::Spectral), b.dims(Method::Spectral));
    }
}
