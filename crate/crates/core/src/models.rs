//! Homogeneous pseudo-Hermitian model geometries.
//!
//! All geometric data are constant in a global frame `(E_1, …, E_m)`:
//!
//! * `rho` is the Hermitian matrix `r` with `ρ_θ(E_α, Ē_β) = i r_αβ`, so
//!   `r = Id` is `dθ` and `tr_θ ρ_θ = 4 tr r`;
//! * `tau` is the complex symmetric matrix `t` with `τ(E_α) = Σ_β t_αβ Ē_β`.
//!
//! The flat models (Heisenberg nilmanifolds, circle bundles over flat tori)
//! carry a section space for spectral computations; the sphere only carries
//! pointwise curvature data.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::clifford::{dtheta, HorizontalVector, C64};
use crate::error::{Error, Result};

/// Truncation of the horizontal mode space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationSpec {
    /// Fourier cutoff `K`: modes `(n_x, n_y) ∈ [−K, K]²` per factor.
    pub modes: usize,
    /// Landau cutoff `L` on the total level `Σ n_α`.
    pub levels: usize,
    /// Eigenvectors with more amplitude than this in the top shell are not
    /// certified.
    pub shell_tol: f64,
    /// Window `|s| ≤ sectors` of characteristic sectors scanned by
    /// cohomology tables.
    pub sectors: usize,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        TruncationSpec { modes: 2, levels: 8, shell_tol: 1e-8, sectors: 2 }
    }
}

impl TruncationSpec {
    pub fn new(modes: usize, levels: usize) -> Self {
        TruncationSpec { modes, levels, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::InvalidTruncation("Fourier cutoff must be at least 1".into()));
        }
        if self.levels == 0 {
            return Err(Error::InvalidTruncation("Landau cutoff must be at least 1".into()));
        }
        if !(self.shell_tol > 0.0 && self.shell_tol.is_finite()) {
            return Err(Error::InvalidTruncation(format!("shell tolerance {} must be positive", self.shell_tol)));
        }
        Ok(())
    }
}

/// A rectangular product lattice `Λ = ⊕_α (a_α Z ⊕ i b_α Z)`; each factor
/// is rescaled to area `π|c|` by [`cr_alpha_bundle`], so only the aspect
/// ratios `a_α / b_α` are stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusLattice {
    pub aspect: Vec<f64>,
}

impl TorusLattice {
    pub fn square(m: usize) -> Self {
        TorusLattice { aspect: vec![1.0; m] }
    }

    pub fn m(&self) -> usize {
        self.aspect.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.aspect.is_empty() {
            return Err(Error::InvalidModel("lattice has no factors".into()));
        }
        if let Some(a) = self.aspect.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidModel(format!("lattice aspect ratio {a} must be positive")));
        }
        Ok(())
    }

    /// Side lengths `(L_x, L_y)` of factor `α` when its area is `area`.
    pub fn sides(&self, alpha: usize, area: f64) -> (f64, f64) {
        let a = self.aspect[alpha];
        ((area * a).sqrt(), (area / a).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ModelFlags {
    pub torsion_free: bool,
    pub regular: bool,
    pub transverse_symmetry: bool,
    pub pseudo_einstein: bool,
}

/// The Webster curvature tensor, where it is known in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvatureTensor {
    Flat,
    /// `R(X,Y)Z = k[g(Y,Z)X − g(X,Z)Y + g(JY,Z)JX − g(JX,Z)JY + 2g(X,JY)JZ]`.
    SpaceForm { k: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    /// Compact Heisenberg quotient in characteristic sector `k`.
    Heisenberg { k: i64, truncation: TruncationSpec },
    /// Circle bundle of flux `c` over a flat torus, twisted into sector `s`.
    TorusBundle { lattice: TorusLattice, c: i64, s: i64, truncation: TruncationSpec },
    Sphere,
    Custom,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Heisenberg { .. } => "heisenberg",
            ModelKind::TorusBundle { .. } => "torus-bundle",
            ModelKind::Sphere => "sphere",
            ModelKind::Custom => "custom",
        }
    }
}

/// Frame-level pseudo-Hermitian geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoHermitianModel {
    pub m: usize,
    pub ell: i64,
    pub tau: DMatrix<C64>,
    pub rho: DMatrix<C64>,
    pub scal: f64,
    /// `[E_α, Ē_β] = structure[(α, β)] · T` on the horizontal frame.
    pub structure: DMatrix<C64>,
    pub flags: ModelFlags,
    pub curvature: Option<CurvatureTensor>,
    pub kind: ModelKind,
}

/// The Heisenberg nilmanifold model.
pub type HeisenbergModel = PseudoHermitianModel;
/// A CR circle bundle over a flat torus.
pub type TorusBundleModel = PseudoHermitianModel;
/// Pointwise data of the standard sphere.
pub type SphereModel = PseudoHermitianModel;

fn zeros(m: usize) -> DMatrix<C64> {
    DMatrix::zeros(m, m)
}

/// `[E_α, Ē_β] = −dθ(E_α, Ē_β) T = −i δ_αβ T`.
fn flat_structure(m: usize) -> DMatrix<C64> {
    DMatrix::from_diagonal_element(m, m, Complex::new(0.0, -1.0))
}

fn flat_flags() -> ModelFlags {
    ModelFlags { torsion_free: true, regular: true, transverse_symmetry: true, pseudo_einstein: true }
}

pub fn heisenberg_model(m: usize, k: i64, truncation: TruncationSpec) -> Result<HeisenbergModel> {
    if m == 0 {
        return Err(Error::InvalidModel("CR dimension must be at least 1".into()));
    }
    truncation.validate()?;
    Ok(PseudoHermitianModel {
        m,
        ell: 0,
        tau: zeros(m),
        rho: zeros(m),
        scal: 0.0,
        structure: flat_structure(m),
        flags: flat_flags(),
        curvature: Some(CurvatureTensor::Flat),
        kind: ModelKind::Heisenberg { k, truncation },
    })
}

/// Circle bundle with `θ = 2A_ω` over `N = C^m/Λ`, flux `c` per factor,
/// twisted into characteristic sector `s`.
pub fn cr_alpha_bundle(lattice: TorusLattice, c: i64, s: i64) -> Result<TorusBundleModel> {
    cr_alpha_bundle_with(lattice, c, s, TruncationSpec::default())
}

pub fn cr_alpha_bundle_with(lattice: TorusLattice, c: i64, s: i64, truncation: TruncationSpec) -> Result<TorusBundleModel> {
    lattice.validate()?;
    truncation.validate()?;
    if c == 0 {
        return Err(Error::InvalidModel("flux c = 0 gives no contact structure".into()));
    }
    let m = lattice.m();
    Ok(PseudoHermitianModel {
        m,
        ell: 0,
        tau: zeros(m),
        rho: zeros(m),
        scal: 0.0,
        structure: flat_structure(m),
        flags: flat_flags(),
        curvature: Some(CurvatureTensor::Flat),
        kind: ModelKind::TorusBundle { lattice, c, s, truncation },
    })
}

/// Sphere data with the default normalization `scal^W = 1`.
pub fn sphere_model(m: usize) -> Result<SphereModel> {
    sphere_model_with_scal(m, 1.0)
}

pub fn sphere_model_with_scal(m: usize, scal: f64) -> Result<SphereModel> {
    if m < 2 {
        return Err(Error::InvalidModel(format!("sphere model needs m >= 2, got m = {m}")));
    }
    if !(scal.is_finite() && scal > 0.0) {
        return Err(Error::InvalidModel(format!("sphere scalar curvature {scal} must be positive")));
    }
    let r = scal / (4.0 * m as f64);
    let k = scal / (4.0 * (m * (m + 1)) as f64);
    Ok(PseudoHermitianModel {
        m,
        ell: 0,
        tau: zeros(m),
        rho: DMatrix::from_diagonal_element(m, m, Complex::new(r, 0.0)),
        scal,
        structure: flat_structure(m),
        flags: flat_flags(),
        curvature: Some(CurvatureTensor::SpaceForm { k }),
        kind: ModelKind::Sphere,
    })
}

/// Hand-built pointwise data; no curvature tensor and no section space.
pub fn custom_model(m: usize, rho: DMatrix<C64>, scal: f64, tau: DMatrix<C64>, flags: ModelFlags) -> Result<PseudoHermitianModel> {
    if m == 0 {
        return Err(Error::InvalidModel("CR dimension must be at least 1".into()));
    }
    for (name, a) in [("rho", &rho), ("tau", &tau)] {
        if a.nrows() != m || a.ncols() != m {
            return Err(Error::InvalidModel(format!("{name} must be {m}x{m}, got {}x{}", a.nrows(), a.ncols())));
        }
    }
    if (&rho - rho.adjoint()).norm() > 1e-12 * (1.0 + rho.norm()) {
        return Err(Error::InvalidModel("rho must be Hermitian".into()));
    }
    if (&tau - tau.transpose()).norm() > 1e-12 * (1.0 + tau.norm()) {
        return Err(Error::InvalidModel("tau must be symmetric".into()));
    }
    if !scal.is_finite() {
        return Err(Error::InvalidModel("scal must be finite".into()));
    }
    Ok(PseudoHermitianModel {
        m,
        ell: 0,
        tau,
        rho,
        scal,
        structure: flat_structure(m),
        flags,
        curvature: None,
        kind: ModelKind::Custom,
    })
}

impl PseudoHermitianModel {
    pub fn with_ell(mut self, ell: i64) -> Self {
        self.ell = ell;
        self
    }

    pub fn truncation(&self) -> Option<&TruncationSpec> {
        match &self.kind {
            ModelKind::Heisenberg { truncation, .. } | ModelKind::TorusBundle { truncation, .. } => Some(truncation),
            _ => None,
        }
    }

    pub fn has_section_space(&self) -> bool {
        self.truncation().is_some()
    }

    /// `ρ_θ(u, v)` for complexified horizontal vectors.
    pub fn rho_form(&self, u: &HorizontalVector<C64>, v: &HorizontalVector<C64>) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..self.m {
            for b in 0..self.m {
                let r = self.rho[(a, b)];
                acc += r * (u.holo[a] * v.antiholo[b] - v.holo[a] * u.antiholo[b]);
            }
        }
        acc * C64::i()
    }

    /// `τ X` for a complexified horizontal vector.
    pub fn tau_apply(&self, x: &HorizontalVector<C64>) -> HorizontalVector<C64> {
        let m = self.m;
        let mut holo = vec![C64::new(0.0, 0.0); m];
        let mut antiholo = vec![C64::new(0.0, 0.0); m];
        for a in 0..m {
            for b in 0..m {
                antiholo[b] += x.holo[a] * self.tau[(a, b)];
                holo[b] += x.antiholo[a] * self.tau[(a, b)].conj();
            }
        }
        HorizontalVector { holo, antiholo }
    }

    /// Curvature `R(X,Y)Z`, if the tensor is known.
    pub fn curvature_apply(
        &self,
        x: &HorizontalVector<C64>,
        y: &HorizontalVector<C64>,
        z: &HorizontalVector<C64>,
    ) -> Option<HorizontalVector<C64>> {
        match self.curvature? {
            CurvatureTensor::Flat => Some(scaled(z, C64::new(0.0, 0.0))),
            CurvatureTensor::SpaceForm { k } => {
                let jx = j_apply(x);
                let jy = j_apply(y);
                let jz = j_apply(z);
                let terms = [
                    (metric(y, z), x.clone()),
                    (-metric(x, z), y.clone()),
                    (metric(&jy, z), jx.clone()),
                    (-metric(&jx, z), jy),
                    (metric(x, &j_apply(y)) * 2.0, jz),
                ];
                let mut out = scaled(z, C64::new(0.0, 0.0));
                for (c, v) in terms {
                    out = add(&out, &scaled(&v, c * k));
                }
                Some(out)
            }
        }
    }
}

/// `J`: multiplication by `i` on `T_10`, by `−i` on `T_01`.
pub fn j_apply(x: &HorizontalVector<C64>) -> HorizontalVector<C64> {
    HorizontalVector {
        holo: x.holo.iter().map(|c| c * C64::i()).collect(),
        antiholo: x.antiholo.iter().map(|c| c * -C64::i()).collect(),
    }
}

/// Complex-bilinear extension of `g_θ`, `g(E_α, Ē_β) = ½ δ_αβ`.
pub fn metric(u: &HorizontalVector<C64>, v: &HorizontalVector<C64>) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..u.holo.len() {
        acc += u.holo[a] * v.antiholo[a] + u.antiholo[a] * v.holo[a];
    }
    acc * 0.5
}

fn scaled(x: &HorizontalVector<C64>, c: C64) -> HorizontalVector<C64> {
    HorizontalVector { holo: x.holo.iter().map(|v| v * c).collect(), antiholo: x.antiholo.iter().map(|v| v * c).collect() }
}

fn add(x: &HorizontalVector<C64>, y: &HorizontalVector<C64>) -> HorizontalVector<C64> {
    HorizontalVector {
        holo: x.holo.iter().zip(&y.holo).map(|(a, b)| a + b).collect(),
        antiholo: x.antiholo.iter().zip(&y.antiholo).map(|(a, b)| a + b).collect(),
    }
}

fn norm(x: &HorizontalVector<C64>) -> f64 {
    x.holo.iter().chain(&x.antiholo).map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn real_frame(m: usize) -> Vec<HorizontalVector<C64>> {
    (0..2 * m).map(|j| HorizontalVector::real_frame(m, j)).collect()
}

/// `tr_θ ω = Σ_i ω(s_i, J s_i)` over a real orthonormal frame.
pub fn trace_theta<F>(m: usize, form: F) -> f64
where
    F: Fn(&HorizontalVector<C64>, &HorizontalVector<C64>) -> C64,
{
    real_frame(m).iter().map(|s| form(s, &j_apply(s)).re).sum()
}

/// Defect between the stored `scal^W` and the trace of
/// `Ric^W(X,Y) = ρ_θ(X,JY) + 2(m−1)τ(X,JY)`.
pub fn ricci_consistency(model: &PseudoHermitianModel) -> f64 {
    let m = model.m;
    let ric = |x: &HorizontalVector<C64>, y: &HorizontalVector<C64>| {
        let jy = j_apply(y);
        model.rho_form(x, &jy) + metric(&model.tau_apply(x), &jy) * (2.0 * (m as f64 - 1.0))
    };
    let trace: f64 = real_frame(m).iter().map(|s| ric(s, s).re).sum();
    (model.scal - trace).abs()
}

/// Largest norm of `Σ_cyc R(X,Y)Z − Σ_cyc dθ(X,Y)τ(Z)` over frame triples;
/// `None` when the curvature tensor is not known.
pub fn bianchi_residual(model: &PseudoHermitianModel) -> Option<f64> {
    model.curvature?;
    let frame = real_frame(model.m);
    let mut worst = 0.0f64;
    for x in &frame {
        for y in &frame {
            for z in &frame {
                let mut lhs = scaled(x, C64::new(0.0, 0.0));
                for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
                    lhs = add(&lhs, &model.curvature_apply(a, b, c)?);
                    lhs = add(&lhs, &scaled(&model.tau_apply(c), -dtheta(a, b)));
                }
                worst = worst.max(norm(&lhs));
            }
        }
    }
    Some(worst)
}

/// Whether `ρ_θ = (scal^W / 4m) dθ` holds to `1e−12`.
pub fn pseudo_einstein_check(model: &PseudoHermitianModel) -> bool {
    let target = DMatrix::from_diagonal_element(model.m, model.m, C64::new(model.scal / (4.0 * model.m as f64), 0.0));
    (&model.rho - target).norm() <= 1e-12 * (1.0 + model.scal.abs())
}

/// Symmetry, trace-freeness and `τJ = −Jτ` defects of the torsion.
pub fn torsion_defects(model: &PseudoHermitianModel) -> (f64, f64, f64) {
    let t = &model.tau;
    let sym = (t - t.transpose()).norm();
    let trace = t.trace().norm();
    let mut anti = 0.0f64;
    for s in real_frame(model.m) {
        let lhs = model.tau_apply(&j_apply(&s));
        let rhs = scaled(&j_apply(&model.tau_apply(&s)), C64::new(-1.0, 0.0));
        anti = anti.max(norm(&add(&lhs, &scaled(&rhs, C64::new(-1.0, 0.0)))));
    }
    (sym, trace, anti)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_is_flat() {
        let h = heisenberg_model(1, 0, TruncationSpec::new(8, 8)).unwrap();
        assert_eq!(h.scal, 0.0);
        let h2 = heisenberg_model(2, 3, TruncationSpec::new(2, 10)).unwrap();
        assert_eq!(h2.rho.norm(), 0.0);
        assert_eq!(bianchi_residual(&h2), Some(0.0));
        assert_eq!(ricci_consistency(&h2), 0.0);
    }

    #[test]
    fn bundle_requires_flux() {
        assert!(cr_alpha_bundle(TorusLattice::square(1), 1, 0).is_ok());
        assert!(cr_alpha_bundle(TorusLattice::square(1), 1, 1).is_ok());
        assert!(matches!(cr_alpha_bundle(TorusLattice::square(1), 0, 1), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn sphere_data() {
        assert!(sphere_model(1).is_err());
        let s = sphere_model(2).unwrap();
        assert!(s.rho.symmetric_eigenvalues().iter().all(|&e| e > 0.0));
        assert!(pseudo_einstein_check(&sphere_model(3).unwrap()));
        assert!(ricci_consistency(&s) < 1e-14);
        assert!(bianchi_residual(&s).unwrap() < 1e-14);
    }

    #[test]
    fn sphere_trace_of_rho_is_scal() {
        let s = sphere_model_with_scal(3, 2.5).unwrap();
        let tr = trace_theta(3, |u, v| s.rho_form(u, v));
        assert!((tr - 2.5).abs() < 1e-13);
    }

    #[test]
    fn inconsistent_scal_is_detected() {
        let rho = DMatrix::from_diagonal_element(2, 2, C64::new(0.25, 0.0));
        let m = custom_model(2, rho, 7.0, DMatrix::zeros(2, 2), ModelFlags::default()).unwrap();
        assert!(ricci_consistency(&m) > 1.0);
        assert_eq!(bianchi_residual(&m), None);
    }

    #[test]
    fn torsion_contributes_no_trace() {
        let mut tau = DMatrix::zeros(2, 2);
        tau[(0, 1)] = C64::new(0.3, -0.2);
        tau[(1, 0)] = C64::new(0.3, -0.2);
        let m = custom_model(2, DMatrix::zeros(2, 2), 0.0, tau, ModelFlags::default()).unwrap();
        assert!(ricci_consistency(&m) < 1e-14);
        let (sym, tr, anti) = torsion_defects(&m);
        assert!(sym < 1e-15 && tr < 1e-15 && anti < 1e-15);
    }

    #[test]
    fn space_form_ricci_matches_rho() {
        // Ric(X, X) from the tensor equals ρ(X, JX) for the sphere
        let s = sphere_model(2).unwrap();
        let frame = real_frame(2);
        for x in &frame {
            let mut ric = C64::new(0.0, 0.0);
            for e in &frame {
                ric += metric(&s.curvature_apply(e, x, x).unwrap(), e);
            }
            let expect = s.rho_form(x, &j_apply(x));
            assert!((ric - expect).norm() < 1e-14, "{ric} vs {expect}");
        }
    }
}
