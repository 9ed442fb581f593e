//! The complex spinor module of a rank-`m` Hermitian vector space.
//!
//! `Σ` is realized as the exterior algebra `Λ•C^m`. Basis vectors are labelled
//! by subsets `S ⊆ {1..m}` and the grade `q = |S|` is the `Θ`-grading: `Θ` acts
//! on the grade-`q` part by `μ_q = m − 2q`.
//!
//! With `ε_α` exterior and `ι_α` interior multiplication by the `α`-th basis
//! vector, the generators are
//!
//! ```text
//! E_α  = ε_α            (raises the grade)
//! Ē_α  = −ι_α           (lowers the grade)
//! e_α  = E_α + Ē_α
//! Je_α = i (E_α − Ē_α)
//! ```
//!
//! so that `{E_α, Ē_β} = −δ_αβ`, the real generators are skew-adjoint and
//! square to `−1`, and `Σ_α Ē_α E_α = −½(m + Θ)`. The Levi pairing is
//! normalized by `dθ(E_α, Ē_β) = i δ_αβ` (equivalently `g_θ(E_α, Ē_α) = ½`).
//!
//! Everything is generic over the coefficient ring so the algebraic
//! identities can be checked in exact Gaussian-rational arithmetic.

use std::fmt::Debug;
use std::ops::Neg;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{Num, One};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Exact complex numbers with rational parts.
pub type GaussianRational = Complex<Rational64>;

/// Coefficient ring for spinor amplitudes.
pub trait Amplitude: Num + Neg<Output = Self> + Clone + Debug {
    fn imag_unit() -> Self;
    fn conjugate(&self) -> Self;
}

impl<T> Amplitude for Complex<T>
where
    T: Clone + Num + Neg<Output = T> + Debug,
{
    fn imag_unit() -> Self {
        Complex::new(T::zero(), T::one())
    }

    fn conjugate(&self) -> Self {
        self.conj()
    }
}

/// Largest supported CR dimension (subsets are stored as `u32` masks).
pub const MAX_CR_DIM: usize = 16;

/// A basis label of `Σ`: a strictly increasing subset of `{1..m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinorIndex {
    mask: u32,
}

impl SpinorIndex {
    pub fn from_mask(mask: u32) -> Self {
        SpinorIndex { mask }
    }

    /// Builds an index from 1-based labels; duplicates and out-of-range labels
    /// are rejected.
    pub fn from_subset(m: usize, labels: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &a in labels {
            if a == 0 || a > m {
                return Err(Error::GeneratorIndex { index: a, m });
            }
            let bit = 1u32 << (a - 1);
            if mask & bit != 0 {
                return Err(Error::InvalidModel(format!("repeated label {a} in spinor index")));
            }
            mask |= bit;
        }
        Ok(SpinorIndex { mask })
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// The grade `q = |S|`.
    pub fn grade(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// 1-based labels in increasing order.
    pub fn subset(&self) -> Vec<usize> {
        (0..32).filter(|b| self.mask & (1 << b) != 0).map(|b| b + 1).collect()
    }

    pub fn contains(&self, alpha: usize) -> bool {
        alpha >= 1 && self.mask & (1 << (alpha - 1)) != 0
    }

    /// Koszul sign `(−1)^{#{β ∈ S : β < α}}`.
    fn koszul_sign(&self, alpha: usize) -> bool {
        let below = self.mask & ((1u32 << (alpha - 1)) - 1);
        below.count_ones() % 2 == 1
    }
}

/// Canonical ordering of the `2^m` basis labels: by grade, then
/// lexicographically by subset.
#[derive(Debug, Clone)]
pub struct SpinorBasis {
    m: usize,
    labels: Vec<SpinorIndex>,
    position: Vec<usize>,
    block_start: Vec<usize>,
}

impl SpinorBasis {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > MAX_CR_DIM {
            return Err(Error::InvalidModel(format!("CR dimension m = {m} outside 1..={MAX_CR_DIM}")));
        }
        let mut labels: Vec<SpinorIndex> = (0..(1u32 << m)).map(SpinorIndex::from_mask).collect();
        labels.sort_by(|a, b| a.grade().cmp(&b.grade()).then_with(|| a.subset().cmp(&b.subset())));
        let mut position = vec![0; labels.len()];
        for (i, l) in labels.iter().enumerate() {
            position[l.mask as usize] = i;
        }
        let mut block_start = vec![0; m + 2];
        for q in 0..=m {
            block_start[q + 1] = block_start[q] + binomial(m, q);
        }
        Ok(SpinorBasis { m, labels, position, block_start })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[SpinorIndex] {
        &self.labels
    }

    pub fn label(&self, pos: usize) -> SpinorIndex {
        self.labels[pos]
    }

    pub fn position(&self, idx: SpinorIndex) -> usize {
        self.position[idx.mask as usize]
    }

    pub fn grade_of(&self, pos: usize) -> usize {
        self.labels[pos].grade()
    }

    /// Positions occupied by the grade-`q` block.
    pub fn block(&self, q: usize) -> std::ops::Range<usize> {
        self.block_start[q]..self.block_start[q + 1]
    }

    /// Image of the basis vector at `pos` under `E_α` (`raise = true`) or
    /// `Ē_α`: a single basis vector with sign, or zero.
    pub fn ladder(&self, raise: bool, alpha: usize, pos: usize) -> Option<(usize, f64)> {
        let s = self.labels[pos];
        let bit = 1u32 << (alpha - 1);
        let sign = if s.koszul_sign(alpha) { -1.0 } else { 1.0 };
        if raise {
            (s.mask & bit == 0).then(|| (self.position[(s.mask | bit) as usize], sign))
        } else {
            (s.mask & bit != 0).then(|| (self.position[(s.mask & !bit) as usize], -sign))
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `μ_q = m − 2q`.
pub fn mu(m: usize, q: usize) -> i64 {
    m as i64 - 2 * q as i64
}

/// An element of `Σ` with coefficients in canonical basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorVector<T> {
    m: usize,
    coeffs: Vec<T>,
}

impl<T: Amplitude> SpinorVector<T> {
    pub fn zero(m: usize) -> Result<Self> {
        let basis = SpinorBasis::new(m)?;
        Ok(SpinorVector { m, coeffs: vec![T::zero(); basis.dim()] })
    }

    /// The basis vector `δ_S`.
    pub fn basis(m: usize, idx: SpinorIndex) -> Result<Self> {
        let basis = SpinorBasis::new(m)?;
        if idx.mask >> m != 0 {
            return Err(Error::GeneratorIndex { index: 32 - idx.mask.leading_zeros() as usize, m });
        }
        let mut v = SpinorVector { m, coeffs: vec![T::zero(); basis.dim()] };
        v.coeffs[basis.position(idx)] = T::one();
        Ok(v)
    }

    pub fn from_coeffs(m: usize, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != 1 << m {
            return Err(Error::DimensionMismatch { expected: 1 << m, found: coeffs.len() });
        }
        Ok(SpinorVector { m, coeffs })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, basis: &SpinorBasis, idx: SpinorIndex) -> &T {
        &self.coeffs[basis.position(idx)]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_m(other.m)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(SpinorVector { m: self.m, coeffs })
    }

    pub fn scale(&self, s: &T) -> Self {
        SpinorVector { m: self.m, coeffs: self.coeffs.iter().map(|a| a.clone() * s.clone()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Hermitian product, conjugate-linear in the first slot.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.check_m(other.m)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(T::zero(), |acc, (a, b)| acc + a.conjugate() * b.clone()))
    }

    fn check_m(&self, m: usize) -> Result<()> {
        if self.m != m {
            return Err(Error::DimensionMismatch { expected: self.m, found: m });
        }
        Ok(())
    }
}

/// Generators of the complex Clifford algebra acting on `Σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliffordGenerator {
    /// `E_α`
    Create(usize),
    /// `Ē_α`
    Annihilate(usize),
    /// `e_α`
    Real(usize),
    /// `Je_α`
    RealJ(usize),
}

impl CliffordGenerator {
    pub fn index(&self) -> usize {
        match *self {
            CliffordGenerator::Create(a)
            | CliffordGenerator::Annihilate(a)
            | CliffordGenerator::Real(a)
            | CliffordGenerator::RealJ(a) => a,
        }
    }
}

fn ladder_apply<T: Amplitude>(raise: bool, alpha: usize, phi: &SpinorVector<T>) -> SpinorVector<T> {
    // the basis is rebuilt here; m ≤ 16 keeps this cheap relative to the caller
    let basis = SpinorBasis::new(phi.m).expect("validated m");
    let mut out = vec![T::zero(); phi.coeffs.len()];
    for (pos, c) in phi.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if let Some((to, sign)) = basis.ladder(raise, alpha, pos) {
            let term = if sign < 0.0 { -c.clone() } else { c.clone() };
            out[to] = out[to].clone() + term;
        }
    }
    SpinorVector { m: phi.m, coeffs: out }
}

/// Clifford action of a generator on a spinor.
pub fn apply_generator<T: Amplitude>(g: CliffordGenerator, phi: &SpinorVector<T>) -> Result<SpinorVector<T>> {
    let alpha = g.index();
    if alpha == 0 || alpha > phi.m {
        return Err(Error::GeneratorIndex { index: alpha, m: phi.m });
    }
    let up = || ladder_apply(true, alpha, phi);
    let down = || ladder_apply(false, alpha, phi);
    Ok(match g {
        CliffordGenerator::Create(_) => up(),
        CliffordGenerator::Annihilate(_) => down(),
        CliffordGenerator::Real(_) => up().add(&down())?,
        CliffordGenerator::RealJ(_) => {
            let d = down().scale(&-T::one());
            up().add(&d)?.scale(&T::imag_unit())
        }
    })
}

/// A horizontal complex vector written in the frame `(E_1..E_m, Ē_1..Ē_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalVector<T> {
    pub holo: Vec<T>,
    pub antiholo: Vec<T>,
}

impl<T: Amplitude> HorizontalVector<T> {
    /// The `j`-th vector of the real orthonormal frame
    /// `(e_1, Je_1, …, e_m, Je_m)`, `j` 0-based.
    pub fn real_frame(m: usize, j: usize) -> Self {
        let mut holo = vec![T::zero(); m];
        let mut antiholo = vec![T::zero(); m];
        let a = j / 2;
        if j % 2 == 0 {
            holo[a] = T::one();
            antiholo[a] = T::one();
        } else {
            holo[a] = T::imag_unit();
            antiholo[a] = -T::imag_unit();
        }
        HorizontalVector { holo, antiholo }
    }

    /// Clifford multiplication `X·φ`.
    pub fn act(&self, phi: &SpinorVector<T>) -> Result<SpinorVector<T>> {
        if self.holo.len() != phi.m {
            return Err(Error::DimensionMismatch { expected: phi.m, found: self.holo.len() });
        }
        let mut out = SpinorVector::zero(phi.m)?;
        for a in 0..phi.m {
            if !self.holo[a].is_zero() {
                out = out.add(&ladder_apply(true, a + 1, phi).scale(&self.holo[a]))?;
            }
            if !self.antiholo[a].is_zero() {
                out = out.add(&ladder_apply(false, a + 1, phi).scale(&self.antiholo[a]))?;
            }
        }
        Ok(out)
    }
}

/// `dθ(u, v) = i Σ_α (u^α v^ᾱ − u^ᾱ v^α)`, the Levi pairing with
/// `dθ(E_α, Ē_β) = i δ_αβ`.
pub fn dtheta<T: Amplitude>(u: &HorizontalVector<T>, v: &HorizontalVector<T>) -> T {
    let mut acc = T::zero();
    for a in 0..u.holo.len() {
        acc = acc + u.holo[a].clone() * v.antiholo[a].clone() - u.antiholo[a].clone() * v.holo[a].clone();
    }
    acc * T::imag_unit()
}

/// Clifford action of a 2-form `ω`, `Σ_{j<k} ω(s_j, s_k) s_j s_k · φ`, over the
/// real orthonormal frame.
pub fn two_form_apply<T, F>(form: F, phi: &SpinorVector<T>) -> Result<SpinorVector<T>>
where
    T: Amplitude,
    F: Fn(&HorizontalVector<T>, &HorizontalVector<T>) -> T,
{
    let m = phi.m;
    let frame: Vec<HorizontalVector<T>> = (0..2 * m).map(|j| HorizontalVector::real_frame(m, j)).collect();
    let mut out = SpinorVector::zero(m)?;
    for j in 0..2 * m {
        for k in (j + 1)..2 * m {
            let w = form(&frame[j], &frame[k]);
            if w.is_zero() {
                continue;
            }
            let sk = frame[k].act(phi)?;
            let sjsk = frame[j].act(&sk)?;
            out = out.add(&sjsk.scale(&w))?;
        }
    }
    Ok(out)
}

/// `Θφ` with `Θ` the Clifford image of `(i/2) dθ`.
pub fn theta_apply<T: Amplitude>(phi: &SpinorVector<T>) -> Result<SpinorVector<T>> {
    let two = T::one() + T::one();
    let half_i = T::imag_unit() / two;
    Ok(two_form_apply(dtheta, phi)?.scale(&half_i))
}

/// Restriction to the `μ_q`-eigenspace (grade `q`).
pub fn project_mu<T: Amplitude>(phi: &SpinorVector<T>, q: usize) -> Result<SpinorVector<T>> {
    if q > phi.m {
        return Err(Error::GradeOutOfRange { q, m: phi.m });
    }
    let basis = SpinorBasis::new(phi.m)?;
    let coeffs = phi
        .coeffs
        .iter()
        .enumerate()
        .map(|(pos, c)| if basis.grade_of(pos) == q { c.clone() } else { T::zero() })
        .collect();
    Ok(SpinorVector { m: phi.m, coeffs })
}

/// Dense matrix of a linear map `Σ → Σ` given by its action on basis vectors.
pub fn matrix_of<T, F>(m: usize, f: F) -> Result<Vec<Vec<T>>>
where
    T: Amplitude,
    F: Fn(&SpinorVector<T>) -> Result<SpinorVector<T>>,
{
    let basis = SpinorBasis::new(m)?;
    let n = basis.dim();
    let mut cols = Vec::with_capacity(n);
    for &idx in basis.labels() {
        cols.push(f(&SpinorVector::basis(m, idx)?)?.coeffs);
    }
    // transpose column images into row-major form
    Ok((0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect())
}

/// Floating-point matrix of a generator in canonical basis order.
pub fn generator_matrix(m: usize, g: CliffordGenerator) -> Result<DMatrix<C64>> {
    let rows = matrix_of::<C64, _>(m, |phi| apply_generator(g, phi))?;
    Ok(to_dmatrix(&rows))
}

/// Floating-point matrix of `Θ`, assembled from the generators.
pub fn theta_matrix(m: usize) -> Result<DMatrix<C64>> {
    let rows = matrix_of::<C64, _>(m, theta_apply)?;
    Ok(to_dmatrix(&rows))
}

/// Floating-point matrix of the Clifford action of a 2-form.
pub fn two_form_matrix<F>(m: usize, form: F) -> Result<DMatrix<C64>>
where
    F: Fn(&HorizontalVector<C64>, &HorizontalVector<C64>) -> C64,
{
    let rows = matrix_of::<C64, _>(m, |phi| two_form_apply(&form, phi))?;
    Ok(to_dmatrix(&rows))
}

fn to_dmatrix(rows: &[Vec<C64>]) -> DMatrix<C64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |r, c| rows[r][c])
}

/// Clifford matrix of a horizontal vector.
pub fn vector_matrix(m: usize, x: &HorizontalVector<C64>) -> Result<DMatrix<C64>> {
    let rows = matrix_of::<C64, _>(m, |phi| x.act(phi))?;
    Ok(to_dmatrix(&rows))
}

pub fn is_zero_exact<T: Amplitude>(rows: &[Vec<T>]) -> bool {
    rows.iter().all(|r| r.iter().all(|c| c.is_zero()))
}

pub fn gaussian(re: i64, im: i64) -> GaussianRational {
    Complex::new(Rational64::from_integer(re), Rational64::from_integer(im))
}

pub fn one<T: One>() -> T {
    T::one()
}

/// Outcome of the exact Clifford relation suite for one `m`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CliffordSuite {
    pub m: usize,
    /// `{E_α, E_β} = {Ē_α, Ē_β} = 0`, `{E_α, Ē_β} = −δ_αβ`.
    pub anticommutators: bool,
    /// `{e_j, e_k} = −2δ_jk` over the real frame `e_α, Je_α`.
    pub real_relations: bool,
    /// `⟨E_α φ, ψ⟩ = −⟨φ, Ē_α ψ⟩`.
    pub adjointness: bool,
    /// `Θ = m − 2q` on every grade-`q` basis vector.
    pub theta_eigenvalues: bool,
    /// `dim Σ^{μ_q} = C(m, q)`.
    pub block_dimensions: bool,
}

impl CliffordSuite {
    pub fn passed(&self) -> bool {
        self.anticommutators && self.real_relations && self.adjointness && self.theta_eigenvalues && self.block_dimensions
    }
}

/// Checks the Clifford relations in exact Gaussian-rational arithmetic.
pub fn clifford_suite(m: usize) -> Result<CliffordSuite> {
    type G = GaussianRational;
    let basis = SpinorBasis::new(m)?;
    let vectors: Vec<SpinorVector<G>> = basis.labels().iter().map(|&i| SpinorVector::basis(m, i)).collect::<Result<_>>()?;
    let anti = |a: CliffordGenerator, b: CliffordGenerator, v: &SpinorVector<G>| -> Result<SpinorVector<G>> {
        apply_generator(a, &apply_generator(b, v)?)?.add(&apply_generator(b, &apply_generator(a, v)?)?)
    };
    let holo: Vec<CliffordGenerator> = (1..=m).map(CliffordGenerator::Create).collect();
    let anti_holo: Vec<CliffordGenerator> = (1..=m).map(CliffordGenerator::Annihilate).collect();
    let real: Vec<CliffordGenerator> = (1..=m).flat_map(|a| [CliffordGenerator::Real(a), CliffordGenerator::RealJ(a)]).collect();

    let mut anticommutators = true;
    let mut real_relations = true;
    let mut adjointness = true;
    for v in &vectors {
        for (i, &a) in holo.iter().enumerate() {
            for (j, &b) in holo.iter().enumerate() {
                anticommutators &= anti(a, b, v)?.is_zero();
                anticommutators &= anti(anti_holo[i], anti_holo[j], v)?.is_zero();
                let expect = if i == j { v.scale(&gaussian(-1, 0)) } else { SpinorVector::zero(m)? };
                anticommutators &= anti(a, anti_holo[j], v)? == expect;
            }
        }
        for (j, &a) in real.iter().enumerate() {
            for (k, &b) in real.iter().enumerate() {
                let expect = if j == k { v.scale(&gaussian(-2, 0)) } else { SpinorVector::zero(m)? };
                real_relations &= anti(a, b, v)? == expect;
            }
        }
        for w in &vectors {
            for a in 1..=m {
                let lhs = apply_generator(CliffordGenerator::Create(a), v)?.inner(w)?;
                let rhs = v.inner(&apply_generator(CliffordGenerator::Annihilate(a), w)?)?;
                adjointness &= lhs == -rhs;
            }
        }
    }
    let mut theta_eigenvalues = true;
    for (pos, v) in vectors.iter().enumerate() {
        let mu_q = mu(m, basis.grade_of(pos));
        theta_eigenvalues &= theta_apply(v)? == v.scale(&gaussian(mu_q, 0));
    }
    let block_dimensions = (0..=m).all(|q| basis.block(q).len() == binomial(m, q));
    Ok(CliffordSuite { m, anticommutators, real_relations, adjointness, theta_eigenvalues, block_dimensions })
}

#[cfg(test)]
mod tests {
    use super::*;

    type G = GaussianRational;

    fn all_basis(m: usize) -> Vec<SpinorVector<G>> {
        let b = SpinorBasis::new(m).unwrap();
        b.labels().iter().map(|&i| SpinorVector::basis(m, i).unwrap()).collect()
    }

    #[test]
    fn create_twice_vanishes() {
        for phi in all_basis(1) {
            let once = apply_generator(CliffordGenerator::Create(1), &phi).unwrap();
            let twice = apply_generator(CliffordGenerator::Create(1), &once).unwrap();
            assert!(twice.is_zero());
        }
    }

    #[test]
    fn mixed_anticommutator_vanishes() {
        for phi in all_basis(2) {
            let a = apply_generator(CliffordGenerator::Annihilate(2), &phi).unwrap();
            let a = apply_generator(CliffordGenerator::Create(1), &a).unwrap();
            let b = apply_generator(CliffordGenerator::Create(1), &phi).unwrap();
            let b = apply_generator(CliffordGenerator::Annihilate(2), &b).unwrap();
            assert!(a.add(&b).unwrap().is_zero());
        }
    }

    #[test]
    fn diagonal_anticommutator_is_minus_one() {
        for phi in all_basis(2) {
            let a = apply_generator(CliffordGenerator::Annihilate(1), &phi).unwrap();
            let a = apply_generator(CliffordGenerator::Create(1), &a).unwrap();
            let b = apply_generator(CliffordGenerator::Create(1), &phi).unwrap();
            let b = apply_generator(CliffordGenerator::Annihilate(1), &b).unwrap();
            assert_eq!(a.add(&b).unwrap(), phi.scale(&gaussian(-1, 0)));
        }
    }

    #[test]
    fn theta_eigenvalues_m3() {
        let empty = SpinorVector::<G>::basis(3, SpinorIndex::from_subset(3, &[]).unwrap()).unwrap();
        assert_eq!(theta_apply(&empty).unwrap(), empty.scale(&gaussian(3, 0)));
        let s12 = SpinorVector::<G>::basis(3, SpinorIndex::from_subset(3, &[1, 2]).unwrap()).unwrap();
        assert_eq!(theta_apply(&s12).unwrap(), s12.scale(&gaussian(-1, 0)));
    }

    #[test]
    fn sum_ebar_e_matches_theta() {
        let m = 2;
        for phi in all_basis(m) {
            let mut acc = SpinorVector::<G>::zero(m).unwrap();
            for a in 1..=m {
                let x = apply_generator(CliffordGenerator::Create(a), &phi).unwrap();
                let x = apply_generator(CliffordGenerator::Annihilate(a), &x).unwrap();
                acc = acc.add(&x).unwrap();
            }
            let th = theta_apply(&phi).unwrap();
            let half = Complex::new(Rational64::new(1, 2), Rational64::from_integer(0));
            let rhs = phi.scale(&gaussian(m as i64, 0)).add(&th).unwrap().scale(&half);
            assert!(acc.add(&rhs).unwrap().is_zero());
        }
    }

    #[test]
    fn project_mu_examples() {
        let d0 = SpinorVector::<G>::basis(1, SpinorIndex::from_mask(0)).unwrap();
        let d1 = SpinorVector::<G>::basis(1, SpinorIndex::from_mask(1)).unwrap();
        let phi = d0.add(&d1).unwrap();
        assert_eq!(project_mu(&phi, 0).unwrap(), d0);
        let total = project_mu(&phi, 0).unwrap().add(&project_mu(&phi, 1).unwrap()).unwrap();
        assert_eq!(total, phi);
        assert!(matches!(project_mu(&phi, 2), Err(Error::GradeOutOfRange { .. })));
    }

    #[test]
    fn errors_on_bad_index_and_mismatch() {
        let phi = SpinorVector::<G>::zero(2).unwrap();
        assert!(matches!(
            apply_generator(CliffordGenerator::Create(3), &phi),
            Err(Error::GeneratorIndex { index: 3, m: 2 })
        ));
        assert!(matches!(
            apply_generator(CliffordGenerator::Real(0), &phi),
            Err(Error::GeneratorIndex { .. })
        ));
        let other = SpinorVector::<G>::zero(3).unwrap();
        assert!(matches!(phi.add(&other), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn block_sizes_are_binomial() {
        for m in 1..=6 {
            let b = SpinorBasis::new(m).unwrap();
            for q in 0..=m {
                assert_eq!(b.block(q).len(), binomial(m, q));
                assert!(b.block(q).all(|p| b.grade_of(p) == q));
            }
        }
    }
}
