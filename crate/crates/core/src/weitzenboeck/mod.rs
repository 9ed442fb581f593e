//! Curvature terms of the Schrödinger–Lichnerowicz formula and residuals of
//! the Weitzenböck identities on section spaces.

pub mod conformal;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::clifford::{binomial, mu, two_form_matrix, SpinorBasis, C64};
use crate::error::{Error, Result};
use crate::models::{trace_theta, PseudoHermitianModel};
use crate::operators::{
    assemble_dirac_squared, assemble_rough_part, fiber_operator, SectionSpace,
};

pub use conformal::{conformal_check, ConformalReport, ConformalScale, SpinorField, TrigTerm};

/// `Q^q` on the grade-`q` fibre block.
#[derive(Debug, Clone)]
pub struct CurvatureTerm {
    pub q: usize,
    pub mu: i64,
    pub ell: i64,
    pub as_matrix: DMatrix<C64>,
    pub eigenvalues: Vec<f64>,
}

impl CurvatureTerm {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Clifford action of `ρ_θ` on the full fibre `Σ`.
pub fn rho_clifford(model: &PseudoHermitianModel) -> Result<DMatrix<C64>> {
    two_form_matrix(model.m, |u, v| model.rho_form(u, v))
}

fn fiber_block(m: usize, a: &DMatrix<C64>, q: usize) -> Result<DMatrix<C64>> {
    let b = SpinorBasis::new(m)?.block(q);
    Ok(a.view((b.start, b.start), (b.len(), b.len())).into_owned())
}

fn hermitian_eigs(a: &DMatrix<C64>) -> Vec<f64> {
    let mut e: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(|x, y| x.total_cmp(y));
    e
}

/// `Q^q = −(i/2)(ℓ/(m+2) + μ_q/m)ρ_θ + (1 + ℓμ_q/(m(m+2))) scal^W/4` on the
/// grade-`q` fibre.
pub fn curvature_term(model: &PseudoHermitianModel, ell: i64, q: usize) -> Result<CurvatureTerm> {
    let m = model.m;
    if q > m {
        return Err(Error::GradeOutOfRange { q, m });
    }
    let full = curvature_operator(model, ell)?;
    let as_matrix = fiber_block(m, &full, q)?;
    let eigenvalues = hermitian_eigs(&as_matrix);
    Ok(CurvatureTerm { q, mu: mu(m, q), ell, as_matrix, eigenvalues })
}

/// `Q` on all of `Σ`, with `μ` read off from `Θ`.
pub fn curvature_operator(model: &PseudoHermitianModel, ell: i64) -> Result<DMatrix<C64>> {
    let m = model.m;
    let (mf, lf) = (m as f64, ell as f64);
    let basis = SpinorBasis::new(m)?;
    let rho = rho_clifford(model)?;
    let n = basis.dim();
    Ok(DMatrix::from_fn(n, n, |r, c| {
        let muq = mu(m, basis.grade_of(c)) as f64;
        let mut v = rho[(r, c)] * C64::new(0.0, -0.5 * (lf / (mf + 2.0) + muq / mf));
        if r == c {
            v += C64::new((1.0 + lf * muq / (mf * (mf + 2.0))) * model.scal / 4.0, 0.0);
        }
        v
    }))
}

/// `Q^q = (2(m−q)/m) R_* + K`.
#[derive(Debug, Clone)]
pub struct QSplit {
    /// `R_* = −(i/2)ρ_θ + scal^W/4`.
    pub r_star: DMatrix<C64>,
    /// `K = −(i(ℓ−m−2)/(2(m+2))) (ρ_θ − scal^W dθ/(4m))`.
    pub k: DMatrix<C64>,
    /// `tr_θ` of the 2-form inside `K`.
    pub k_trace: f64,
    /// `‖Q^q − (2(m−q)/m)R_* − K‖`.
    pub reassembly_defect: f64,
}

pub fn q_split(model: &PseudoHermitianModel, ell: i64, q: usize) -> Result<QSplit> {
    let m = model.m;
    if q > m {
        return Err(Error::GradeOutOfRange { q, m });
    }
    let mf = m as f64;
    let shift = model.scal / (4.0 * mf);
    let traceless = |u: &_, v: &_| model.rho_form(u, v) - crate::clifford::dtheta(u, v) * shift;
    let rho = fiber_block(m, &rho_clifford(model)?, q)?;
    let trl = fiber_block(m, &two_form_matrix(m, traceless)?, q)?;
    let d = rho.nrows();
    let id = DMatrix::<C64>::identity(d, d);
    let r_star = &rho * C64::new(0.0, -0.5) + &id * C64::new(model.scal / 4.0, 0.0);
    let k = trl * C64::new(0.0, -((ell as f64) - mf - 2.0) / (2.0 * (mf + 2.0)));
    let q_mat = curvature_term(model, ell, q)?.as_matrix;
    let reassembly_defect = (q_mat - (&r_star * C64::new(2.0 * (mf - q as f64) / mf, 0.0) + &k)).norm();
    let k_trace = trace_theta(m, traceless);
    Ok(QSplit { r_star, k, k_trace, reassembly_defect })
}

/// The lower bound on `min spec Q^q` from Cauchy–Schwarz when `ρ_θ` is
/// semidefinite.
pub fn q_lower_bound(m: usize, ell: i64, q: usize, scal: f64) -> f64 {
    let (mf, lf, muq) = (m as f64, ell as f64, mu(m, q) as f64);
    if mf * lf + (mf + 2.0) * muq >= 0.0 {
        (mf - muq) * (mf + 2.0 - lf) / (mf * (mf + 2.0)) * scal / 4.0
    } else {
        (mf + muq) * (mf + 2.0 + lf) / (mf * (mf + 2.0)) * scal / 4.0
    }
}

/// Spectral norm of a matrix.
pub fn op_norm(a: &DMatrix<C64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `‖D_θ² − RHS‖` for
/// `RHS = (1−Θ/m)∇*₁₀∇₁₀ + (1+Θ/m)∇*₀₁∇₀₁ + Q(Θ)`.
pub fn sl_residual(space: &SectionSpace) -> Result<f64> {
    let model = space.model();
    let m = space.m();
    let mf = m as f64;
    let d2 = assemble_dirac_squared(space)?.matrix;
    let n10 = assemble_rough_part(space, true)?.matrix;
    let n01 = assemble_rough_part(space, false)?.matrix;
    let curv = fiber_operator(space, &curvature_operator(model, model.ell)?);
    let n = space.dim();
    let w10 = DMatrix::from_fn(n, n, |r, c| if r == c { C64::new(1.0 - mu(m, space.grade_of(r)) as f64 / mf, 0.0) } else { C64::new(0.0, 0.0) });
    let w01 = DMatrix::from_fn(n, n, |r, c| if r == c { C64::new(1.0 + mu(m, space.grade_of(r)) as f64 / mf, 0.0) } else { C64::new(0.0, 0.0) });
    let rhs = w10 * n10 + w01 * n01 + curv;
    Ok(op_norm(&(d2 - rhs)))
}

/// Summary of the `𝒟_ℓ*𝒟_ℓ` identity on the `μ = −ℓ` block.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DlResidual {
    pub ell: i64,
    pub q: usize,
    pub residual: f64,
}

/// `‖𝒟_ℓ*𝒟_ℓ − RHS‖` with
/// `RHS = (m+ℓ)/m ∇*₁₀∇₁₀ + (m−ℓ)/m ∇*₀₁∇₀₁ + iℓρ_θ/(m(m+2)) + (1 − ℓ²/(m(m+2))) scal^W/4`.
pub fn dl_residual(space: &SectionSpace, ell: i64) -> Result<DlResidual> {
    let m = space.m();
    let mi = m as i64;
    if ell.abs() > mi || (ell + mi) % 2 != 0 {
        return Err(Error::WeightParity { ell, m });
    }
    let q = ((mi + ell) / 2) as usize;
    let (mf, lf) = (m as f64, ell as f64);
    let model = space.model();
    let blk = space.block(q);
    let take = |a: DMatrix<C64>| a.view((blk.start, blk.start), (blk.len(), blk.len())).into_owned();
    let lhs = take(assemble_dirac_squared(space)?.matrix);
    let n10 = take(assemble_rough_part(space, true)?.matrix);
    let n01 = take(assemble_rough_part(space, false)?.matrix);
    let rho = take(fiber_operator(space, &rho_clifford(model)?));
    let id = DMatrix::<C64>::identity(blk.len(), blk.len());
    let rhs = n10 * C64::new((mf + lf) / mf, 0.0)
        + n01 * C64::new((mf - lf) / mf, 0.0)
        + rho * C64::new(0.0, lf / (mf * (mf + 2.0)))
        + id * C64::new((1.0 - lf * lf / (mf * (mf + 2.0))) * model.scal / 4.0, 0.0);
    Ok(DlResidual { ell, q, residual: op_norm(&(lhs - rhs)) })
}

/// Admissible weights `ℓ ∈ {−m, −m+2, …, m}`.
pub fn admissible_weights(m: usize) -> Vec<i64> {
    (0..=m).map(|q| 2 * q as i64 - m as i64).collect()
}

/// Rank of the grade-`q` fibre block.
pub fn fiber_rank(m: usize, q: usize) -> usize {
    binomial(m, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{custom_model, heisenberg_model, sphere_model, ModelFlags, TruncationSpec};

    #[test]
    fn flat_curvature_vanishes() {
        let h = heisenberg_model(2, 0, TruncationSpec::default()).unwrap();
        for q in 0..=2 {
            assert!(curvature_term(&h, 0, q).unwrap().as_matrix.norm() == 0.0);
            let s = q_split(&h, 2, q).unwrap();
            assert!(s.r_star.norm() == 0.0 && s.k.norm() == 0.0);
        }
    }

    #[test]
    fn middle_degree_spin_term_is_scalar() {
        let s = sphere_model(4).unwrap();
        let t = curvature_term(&s, 0, 2).unwrap();
        let d = t.as_matrix.nrows();
        assert!((t.as_matrix - DMatrix::identity(d, d) * C64::new(s.scal / 4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn sphere_term_positive() {
        let s = sphere_model(2).unwrap();
        assert!(curvature_term(&s, 0, 1).unwrap().min_eigenvalue() > 0.0);
    }

    #[test]
    fn split_reassembles_and_k_is_traceless() {
        let mut rho = DMatrix::zeros(3, 3);
        rho[(0, 0)] = C64::new(0.7, 0.0);
        rho[(1, 1)] = C64::new(0.2, 0.0);
        rho[(0, 1)] = C64::new(0.1, 0.3);
        rho[(1, 0)] = C64::new(0.1, -0.3);
        let scal = 4.0 * 0.9;
        let model = custom_model(3, rho, scal, DMatrix::zeros(3, 3), ModelFlags::default()).unwrap();
        for ell in [-5, 0, 5] {
            for q in 0..=3 {
                let s = q_split(&model, ell, q).unwrap();
                assert!(s.reassembly_defect < 1e-12);
                assert!(s.k_trace.abs() < 1e-12);
            }
        }
        assert!(q_split(&model, 5, 1).unwrap().k.norm() < 1e-15);
    }

    #[test]
    fn wrong_parity_is_rejected() {
        let h = heisenberg_model(2, 0, TruncationSpec::new(1, 4)).unwrap();
        let space = SectionSpace::new(&h).unwrap();
        assert!(matches!(dl_residual(&space, 1), Err(Error::WeightParity { .. })));
        assert!(matches!(dl_residual(&space, 4), Err(Error::WeightParity { .. })));
    }
}
