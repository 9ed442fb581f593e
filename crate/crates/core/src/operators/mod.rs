//! Kohn–Dirac, sub-Laplacian and twistor operators on truncated section
//! spaces of the flat models.
//!
//! A section space is `Σ ⊗ (horizontal modes)` in one characteristic sector.
//! Basis index `i = spinor_position · n_modes + mode_position`, so the
//! grade-`q` spinors form a contiguous block.
//!
//! First-order operators are Galerkin compressions `P A P` to the mode
//! cutoff. Second-order operators are assembled as `P A B P` with the inner
//! product taken on the cutoff raised by one, which is the exact compression
//! of the composite.

pub mod modes;

use std::ops::Range;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use nalgebra_sparse::{CooMatrix, CscMatrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{binomial, SpinorBasis, C64};
use crate::error::{Error, Result};
use crate::models::{ModelKind, PseudoHermitianModel, TorusLattice};
use modes::{ModeLabel, ModeSpace};

pub const ALGEBRAIC_TOL: f64 = 1e-12;
pub const DUAL_ASSEMBLY_TOL: f64 = 1e-10;
pub const SPECTRAL_TOL: f64 = 1e-8;

fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Truncated basis of spinor fields in one characteristic sector.
#[derive(Debug, Clone)]
pub struct SectionSpace {
    model: PseudoHermitianModel,
    sector: i64,
    lambda: f64,
    degeneracy: u64,
    basis: SpinorBasis,
    modes: ModeSpace,
    buffer: ModeSpace,
    shell_tol: f64,
}

impl SectionSpace {
    /// The section space in the model's own sector.
    pub fn new(model: &PseudoHermitianModel) -> Result<Self> {
        let sector = match &model.kind {
            ModelKind::Heisenberg { k, .. } => *k,
            ModelKind::TorusBundle { s, .. } => *s,
            ModelKind::Sphere => return Err(Error::NoSectionSpace("sphere model")),
            ModelKind::Custom => return Err(Error::NoSectionSpace("custom model")),
        };
        Self::for_sector(model, sector)
    }

    /// The section space in characteristic sector `sector` (`k` for the
    /// Heisenberg model, `s` for torus bundles).
    pub fn for_sector(model: &PseudoHermitianModel, sector: i64) -> Result<Self> {
        let (lattice, c, truncation) = match &model.kind {
            ModelKind::Heisenberg { truncation, .. } => (TorusLattice::square(model.m), 1, *truncation),
            ModelKind::TorusBundle { lattice, c, truncation, .. } => (lattice.clone(), *c, *truncation),
            ModelKind::Sphere => return Err(Error::NoSectionSpace("sphere model")),
            ModelKind::Custom => return Err(Error::NoSectionSpace("custom model")),
        };
        truncation.validate()?;
        let m = model.m;
        let lambda = (sector * c.signum()) as f64;
        let area = std::f64::consts::PI * c.unsigned_abs() as f64;
        let modes = if sector == 0 {
            ModeSpace::fourier(truncation.modes, (0..m).map(|a| lattice.sides(a, area)).collect())
        } else {
            ModeSpace::landau(m, truncation.levels, lambda)
        };
        let degeneracy = if sector == 0 { 1 } else { (sector.unsigned_abs() * c.unsigned_abs()).pow(m as u32) };
        let buffer = modes.enlarged();
        Ok(SectionSpace {
            model: model.clone(),
            sector,
            lambda,
            degeneracy,
            basis: SpinorBasis::new(m)?,
            modes,
            buffer,
            shell_tol: truncation.shell_tol,
        })
    }

    pub fn model(&self) -> &PseudoHermitianModel {
        &self.model
    }

    pub fn m(&self) -> usize {
        self.model.m
    }

    pub fn sector(&self) -> i64 {
        self.sector
    }

    /// Eigenvalue of `𝒩 = i∇_T` on this sector.
    pub fn n_eigenvalue(&self) -> f64 {
        self.lambda
    }

    /// Multiplicity of every basis vector from the inert lowest-Landau-level
    /// index (`|s·c|^m`; 1 in the projectable sector).
    pub fn degeneracy(&self) -> u64 {
        self.degeneracy
    }

    pub fn spinor_basis(&self) -> &SpinorBasis {
        &self.basis
    }

    pub fn modes(&self) -> &ModeSpace {
        &self.modes
    }

    pub fn shell_tol(&self) -> f64 {
        self.shell_tol
    }

    pub fn dim(&self) -> usize {
        self.basis.dim() * self.modes.len()
    }

    pub fn index(&self, spinor: usize, mode: usize) -> usize {
        spinor * self.modes.len() + mode
    }

    /// Basis positions of the grade-`q` block.
    pub fn block(&self, q: usize) -> Range<usize> {
        let b = self.basis.block(q);
        b.start * self.modes.len()..b.end * self.modes.len()
    }

    pub fn grade_of(&self, i: usize) -> usize {
        self.basis.grade_of(i / self.modes.len())
    }

    pub fn in_top_shell(&self, i: usize) -> bool {
        self.modes.in_top_shell(i % self.modes.len())
    }

    /// `(sector, mode label, spinor subset)` for every basis vector.
    pub fn labels(&self) -> Vec<(i64, ModeLabel, Vec<usize>)> {
        (0..self.dim())
            .map(|i| {
                let n = self.modes.len();
                (self.sector, self.modes.labels()[i % n].clone(), self.basis.label(i / n).subset())
            })
            .collect()
    }

    pub fn layout(&self) -> BlockLayout {
        BlockLayout { segments: (0..=self.m()).map(|q| (q, self.block(q))).collect() }
    }
}

/// Grade labels of a matrix index range.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockLayout {
    pub segments: Vec<(usize, Range<usize>)>,
}

impl BlockLayout {
    pub fn dim(&self) -> usize {
        self.segments.iter().map(|(_, r)| r.len()).sum()
    }

    fn restricted(&self, q: usize) -> BlockLayout {
        let r = self.segments.iter().find(|(g, _)| *g == q).map(|(_, r)| r.len()).unwrap_or(0);
        BlockLayout { segments: vec![(q, 0..r)] }
    }

    fn repeated(&self, copies: usize) -> BlockLayout {
        let d = self.dim();
        BlockLayout {
            segments: (0..copies)
                .flat_map(|c| self.segments.iter().map(move |(q, r)| (*q, r.start + c * d..r.end + c * d)))
                .collect(),
        }
    }
}

/// Dense operator with grade bookkeeping.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub name: String,
    pub matrix: DMatrix<C64>,
    pub domain: BlockLayout,
    pub codomain: BlockLayout,
    /// Allowed values of `codomain grade − domain grade`.
    pub grade_shifts: Vec<i64>,
}

impl OperatorMatrix {
    fn square(name: &str, space: &SectionSpace, matrix: DMatrix<C64>, shifts: &[i64]) -> Self {
        OperatorMatrix {
            name: name.into(),
            matrix,
            domain: space.layout(),
            codomain: space.layout(),
            grade_shifts: shifts.to_vec(),
        }
    }

    pub fn dim(&self) -> (usize, usize) {
        self.matrix.shape()
    }

    /// Largest Frobenius norm of a sub-block at a grade shift not listed in
    /// `grade_shifts`.
    pub fn verify_grading(&self) -> f64 {
        let mut worst = 0.0f64;
        for (qd, rd) in &self.domain.segments {
            for (qc, rc) in &self.codomain.segments {
                if self.grade_shifts.contains(&(*qc as i64 - *qd as i64)) || rd.is_empty() || rc.is_empty() {
                    continue;
                }
                let blk = self.matrix.view((rc.start, rd.start), (rc.len(), rd.len()));
                worst = worst.max(blk.norm());
            }
        }
        worst
    }

    /// `‖A − A*‖` (Frobenius); infinite for rectangular matrices.
    pub fn hermitian_defect(&self) -> f64 {
        if self.matrix.nrows() != self.matrix.ncols() {
            return f64::INFINITY;
        }
        (&self.matrix - self.matrix.adjoint()).norm()
    }

    /// `A*A`, which is Hermitian and block-diagonal on the domain grading.
    pub fn gram(&self) -> OperatorMatrix {
        OperatorMatrix {
            name: format!("({})*({})", self.name, self.name),
            matrix: self.matrix.adjoint() * &self.matrix,
            domain: self.domain.clone(),
            codomain: self.domain.clone(),
            grade_shifts: vec![0],
        }
    }

    /// Sub-block from domain grade `qd` to codomain grade `qc`.
    pub fn block(&self, qc: usize, qd: usize) -> DMatrix<C64> {
        let find = |l: &BlockLayout, q: usize| l.segments.iter().find(|(g, _)| *g == q).map(|(_, r)| r.clone());
        match (find(&self.codomain, qc), find(&self.domain, qd)) {
            (Some(rc), Some(rd)) => self.matrix.view((rc.start, rd.start), (rc.len(), rd.len())).into_owned(),
            _ => DMatrix::zeros(0, 0),
        }
    }
}

// ---------------------------------------------------------------------------
// sparse assembly on a mode space

pub(crate) struct Assembler<'a> {
    pub(crate) basis: &'a SpinorBasis,
    pub(crate) modes: &'a ModeSpace,
}

impl<'a> Assembler<'a> {
    pub(crate) fn dim(&self) -> usize {
        self.basis.dim() * self.modes.len()
    }

    pub(crate) fn idx(&self, sp: usize, md: usize) -> usize {
        sp * self.modes.len() + md
    }

    /// Builds a square operator from its action on basis vectors.
    pub(crate) fn build<F>(&self, f: F) -> CscMatrix<C64>
    where
        F: Fn(usize, usize, &mut Vec<(usize, C64)>) + Sync,
    {
        let n = self.dim();
        let nm = self.modes.len();
        let cols: Vec<Vec<(usize, C64)>> = (0..n)
            .into_par_iter()
            .map(|col| {
                let mut out = Vec::new();
                f(col / nm, col % nm, &mut out);
                out
            })
            .collect();
        let mut coo = CooMatrix::new(n, n);
        for (col, entries) in cols.into_iter().enumerate() {
            for (row, v) in entries {
                coo.push(row, col, v);
            }
        }
        CscMatrix::from(&coo)
    }

    pub(crate) fn deriv(&self, holo: bool, alpha: usize, md: usize) -> Option<(usize, C64)> {
        let (label, c) = self.modes.derivative(holo, alpha, md)?;
        self.modes.position(&label).map(|p| (p, c))
    }

    /// `∇_{E_α}` or `∇_{Ē_α}`.
    pub(crate) fn nabla(&self, holo: bool, alpha: usize) -> CscMatrix<C64> {
        self.build(|sp, md, out| {
            if let Some((p, c)) = self.deriv(holo, alpha, md) {
                out.push((self.idx(sp, p), c));
            }
        })
    }

    /// Clifford multiplication by `E_α` (`raise`) or `Ē_α`.
    pub(crate) fn cliff(&self, raise: bool, alpha: usize) -> CscMatrix<C64> {
        self.build(|sp, md, out| {
            if let Some((to, sign)) = self.basis.ladder(raise, alpha + 1, sp) {
                out.push((self.idx(to, md), C64::new(sign, 0.0)));
            }
        })
    }

    /// `D₊ = 2 Σ E_α ∇_{Ē_α}` (`plus`) or `D₋ = 2 Σ Ē_α ∇_{E_α}`.
    pub(crate) fn dirac_part(&self, plus: bool) -> CscMatrix<C64> {
        let m = self.basis.m();
        self.build(|sp, md, out| {
            for a in 0..m {
                let Some((to, sign)) = self.basis.ladder(plus, a + 1, sp) else { continue };
                if let Some((p, c)) = self.deriv(!plus, a, md) {
                    out.push((self.idx(to, p), c * (2.0 * sign)));
                }
            }
        })
    }
}

impl SectionSpace {
    pub(crate) fn core(&self) -> Assembler<'_> {
        Assembler { basis: &self.basis, modes: &self.modes }
    }

    pub(crate) fn buffered(&self) -> Assembler<'_> {
        Assembler { basis: &self.basis, modes: &self.buffer }
    }

    /// Map from buffer basis positions to core positions.
    pub(crate) fn core_map(&self) -> Vec<Option<usize>> {
        let nb = self.buffer.len();
        (0..self.basis.dim() * nb)
            .map(|i| {
                let (sp, md) = (i / nb, i % nb);
                self.modes.position(&self.buffer.labels()[md]).map(|p| self.index(sp, p))
            })
            .collect()
    }

    pub(crate) fn compress(&self, a: &CscMatrix<C64>) -> DMatrix<C64> {
        let map = self.core_map();
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (r, c, v) in a.triplet_iter() {
            if let (Some(r), Some(c)) = (map[r], map[c]) {
                out[(r, c)] += *v;
            }
        }
        out
    }

    pub(crate) fn dense(&self, a: &CscMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(a.nrows(), a.ncols());
        for (r, c, v) in a.triplet_iter() {
            out[(r, c)] += *v;
        }
        out
    }

    /// `P A B P` for second-order composites; `terms` lists weighted
    /// `(A, B)` factors assembled on the buffer.
    pub(crate) fn composite(&self, terms: &[(C64, CscMatrix<C64>, CscMatrix<C64>)]) -> DMatrix<C64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (w, a, b) in terms {
            out += self.compress(&(a * b)) * *w;
        }
        out
    }

    /// `Θ ⊗ Id`.
    pub fn theta(&self) -> OperatorMatrix {
        let m = self.m() as f64;
        let d = DVector::from_fn(self.dim(), |i, _| C64::new(m - 2.0 * self.grade_of(i) as f64, 0.0));
        OperatorMatrix::square("Theta", self, DMatrix::from_diagonal(&d), &[0])
    }

    /// Compressed `∇_{E_α}` (`holo`) or `∇_{Ē_α}`, `alpha` 0-based.
    pub fn nabla(&self, holo: bool, alpha: usize) -> OperatorMatrix {
        let name = if holo { format!("nabla_E{}", alpha + 1) } else { format!("nabla_Ebar{}", alpha + 1) };
        OperatorMatrix::square(&name, self, self.dense(&self.core().nabla(holo, alpha)), &[0])
    }

    /// Clifford multiplication by `E_α` or `Ē_α` on fields, `alpha` 0-based.
    pub fn clifford(&self, raise: bool, alpha: usize) -> OperatorMatrix {
        let name = if raise { format!("E{}", alpha + 1) } else { format!("Ebar{}", alpha + 1) };
        OperatorMatrix::square(&name, self, self.dense(&self.core().cliff(raise, alpha)), &[if raise { 1 } else { -1 }])
    }
}

// ---------------------------------------------------------------------------
// public assembly routines

pub fn assemble_dplus(space: &SectionSpace) -> Result<OperatorMatrix> {
    Ok(OperatorMatrix::square("D+", space, space.dense(&space.core().dirac_part(true)), &[1]))
}

pub fn assemble_dminus(space: &SectionSpace) -> Result<OperatorMatrix> {
    Ok(OperatorMatrix::square("D-", space, space.dense(&space.core().dirac_part(false)), &[-1]))
}

pub fn assemble_kohn_dirac(space: &SectionSpace) -> Result<OperatorMatrix> {
    let a = space.core();
    let d = &a.dirac_part(true) + &a.dirac_part(false);
    Ok(OperatorMatrix::square("D_theta", space, space.dense(&d), &[-1, 1]))
}

/// `D_θ²` as the exact compression of the square.
pub fn assemble_dirac_squared(space: &SectionSpace) -> Result<OperatorMatrix> {
    let b = space.buffered();
    let d = &b.dirac_part(true) + &b.dirac_part(false);
    let one = C64::new(1.0, 0.0);
    Ok(OperatorMatrix::square("D_theta^2", space, space.composite(&[(one, d.clone(), d)]), &[0]))
}

/// `∇*₁₀∇₁₀ = 2 Σ (∇_{E_α})* ∇_{E_α}` (`holo`) or `∇*₀₁∇₀₁`, assembled in
/// Gram form; the factor 2 is `|E*_α|²`.
pub fn assemble_rough_part(space: &SectionSpace, holo: bool) -> Result<OperatorMatrix> {
    let b = space.buffered();
    let map = space.core_map();
    let n = space.dim();
    let nb = map.len();
    let mut out = DMatrix::<C64>::zeros(n, n);
    for a in 0..space.m() {
        // rectangular core → buffer factor
        let full = space.dense(&b.nabla(holo, a));
        let mut rect = DMatrix::<C64>::zeros(nb, n);
        for (bc, core) in map.iter().enumerate() {
            if let Some(c) = core {
                rect.set_column(*c, &full.column(bc));
            }
        }
        out += rect.adjoint() * &rect * C64::new(2.0, 0.0);
    }
    let name = if holo { "nabla10*nabla10" } else { "nabla01*nabla01" };
    Ok(OperatorMatrix::square(name, space, out, &[0]))
}

/// `Δ^tr = −tr_θ(∇^tr ∘ ∇^tr) = −Σ_i ∇_{s_i}∇_{s_i}` over the real frame.
pub fn assemble_sub_laplacian(space: &SectionSpace) -> Result<OperatorMatrix> {
    let b = space.buffered();
    let mut terms = Vec::new();
    for a in 0..space.m() {
        let e = b.nabla(true, a);
        let eb = b.nabla(false, a);
        // ∇_{e_α} = ∇_E + ∇_Ē, ∇_{Je_α} = i(∇_E − ∇_Ē)
        let re = &e + &eb;
        let rj = (&e - &eb) * C64::new(0.0, 1.0);
        terms.push((C64::new(-1.0, 0.0), re.clone(), re));
        terms.push((C64::new(-1.0, 0.0), rj.clone(), rj));
    }
    Ok(OperatorMatrix::square("sub-Laplacian", space, space.composite(&terms), &[0]))
}

/// `∇_T` by direct differentiation along the fibre: `𝒩 = i∇_T = λ`.
pub fn assemble_nabla_t(space: &SectionSpace) -> Result<OperatorMatrix> {
    let n = space.dim();
    let m = DMatrix::from_diagonal_element(n, n, C64::new(0.0, -space.n_eigenvalue()));
    Ok(OperatorMatrix::square("nabla_T", space, m, &[0]))
}

/// `∇_T = (i/4m)(2∇*₁₀∇₁₀ − 2∇*₀₁∇₀₁ + iρ_θ − ℓ scal^W/(2(m+2)))`.
pub fn assemble_nabla_t_formula(space: &SectionSpace) -> Result<OperatorMatrix> {
    let model = space.model();
    let m = space.m() as f64;
    let n10 = assemble_rough_part(space, true)?.matrix;
    let n01 = assemble_rough_part(space, false)?.matrix;
    let rho = fiber_operator(space, &crate::weitzenboeck::rho_clifford(model)?);
    let n = space.dim();
    let scalar = C64::new(-(model.ell as f64) * model.scal / (2.0 * (m + 2.0)), 0.0);
    let inner = n10 * C64::new(2.0, 0.0) - n01 * C64::new(2.0, 0.0) + rho * C64::i()
        + DMatrix::from_diagonal_element(n, n, scalar);
    Ok(OperatorMatrix::square("nabla_T (formula)", space, inner * C64::new(0.0, 1.0 / (4.0 * m)), &[0]))
}

/// `𝒩 = i∇_T`.
pub fn assemble_n_operator(space: &SectionSpace) -> Result<OperatorMatrix> {
    let t = assemble_nabla_t(space)?;
    Ok(OperatorMatrix::square("N", space, t.matrix * C64::i(), &[0]))
}

/// Lifts a `2^m × 2^m` fibre matrix to `A ⊗ Id_modes`.
pub fn fiber_operator(space: &SectionSpace, a: &DMatrix<C64>) -> DMatrix<C64> {
    let nm = space.modes().len();
    let n = space.dim();
    let mut out = DMatrix::zeros(n, n);
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            let v = a[(r, c)];
            if v != czero() {
                for k in 0..nm {
                    out[(r * nm + k, c * nm + k)] = v;
                }
            }
        }
    }
    out
}

pub fn twistor_coefficients(m: usize, q: usize) -> (f64, f64) {
    (1.0 / (2.0 * (q as f64 + 1.0)), 1.0 / (2.0 * (m as f64 - q as f64 + 1.0)))
}

/// Twistor operator `P^{(μ_q)} = P₁₀ + P₀₁` from the grade-`q` block into
/// `T*_H ⊗ Σ`, with
///
/// ```text
/// P₁₀φ = Σ E*_α ⊗ (∇_{E_α}φ + b_q E_α·D₋φ)
/// P₀₁φ = Σ Ē*_α ⊗ (∇_{Ē_α}φ + a_q Ē_α·D₊φ)
/// ```
///
/// Row layout: component `c` (`E*_1..E*_m, Ē*_1..Ē*_m`) times `space.dim()`.
pub fn assemble_twistor(space: &SectionSpace, q: usize) -> Result<OperatorMatrix> {
    let m = space.m();
    if q > m {
        return Err(Error::GradeOutOfRange { q, m });
    }
    let (aq, bq) = twistor_coefficients(m, q);
    let full = twistor_pieces(space)?;
    let n = space.dim();
    let blk = space.block(q);
    let mut out = DMatrix::<C64>::zeros(2 * m * n, blk.len());
    for a in 0..m {
        let top = full.nabla_e[a].clone() + &full.e[a] * &full.dminus * C64::new(bq, 0.0);
        let bottom = full.nabla_ebar[a].clone() + &full.ebar[a] * &full.dplus * C64::new(aq, 0.0);
        out.view_mut((a * n, 0), (n, blk.len())).copy_from(&top.columns(blk.start, blk.len()));
        out.view_mut(((m + a) * n, 0), (n, blk.len())).copy_from(&bottom.columns(blk.start, blk.len()));
    }
    Ok(OperatorMatrix {
        name: format!("twistor(q={q})"),
        matrix: out,
        domain: space.layout().restricted(q),
        codomain: space.layout().repeated(2 * m),
        grade_shifts: vec![0],
    })
}

struct TwistorPieces {
    nabla_e: Vec<DMatrix<C64>>,
    nabla_ebar: Vec<DMatrix<C64>>,
    e: Vec<DMatrix<C64>>,
    ebar: Vec<DMatrix<C64>>,
    dplus: DMatrix<C64>,
    dminus: DMatrix<C64>,
}

fn twistor_pieces(space: &SectionSpace) -> Result<TwistorPieces> {
    let m = space.m();
    Ok(TwistorPieces {
        nabla_e: (0..m).map(|a| space.nabla(true, a).matrix).collect(),
        nabla_ebar: (0..m).map(|a| space.nabla(false, a).matrix).collect(),
        e: (0..m).map(|a| space.clifford(true, a).matrix).collect(),
        ebar: (0..m).map(|a| space.clifford(false, a).matrix).collect(),
        dplus: assemble_dplus(space)?.matrix,
        dminus: assemble_dminus(space)?.matrix,
    })
}

/// Pointwise Clifford contraction `T*_H ⊗ Σ → Σ`:
/// `c(E*_α ⊗ ψ) = 2Ē_α·ψ`, `c(Ē*_α ⊗ ψ) = 2E_α·ψ`.
pub fn contraction(space: &SectionSpace) -> DMatrix<C64> {
    let m = space.m();
    let n = space.dim();
    let mut out = DMatrix::<C64>::zeros(n, 2 * m * n);
    for a in 0..m {
        let eb = space.clifford(false, a).matrix * C64::new(2.0, 0.0);
        let e = space.clifford(true, a).matrix * C64::new(2.0, 0.0);
        out.view_mut((0, a * n), (n, n)).copy_from(&eb);
        out.view_mut((0, (m + a) * n), (n, n)).copy_from(&e);
    }
    out
}

/// `∇^tr` restricted to the grade-`q` block, in the twistor row layout.
pub fn assemble_transversal_derivative(space: &SectionSpace, q: usize) -> Result<DMatrix<C64>> {
    let m = space.m();
    if q > m {
        return Err(Error::GradeOutOfRange { q, m });
    }
    let n = space.dim();
    let blk = space.block(q);
    let mut out = DMatrix::<C64>::zeros(2 * m * n, blk.len());
    for a in 0..m {
        let e = space.nabla(true, a).matrix;
        let eb = space.nabla(false, a).matrix;
        out.view_mut((a * n, 0), (n, blk.len())).copy_from(&e.columns(blk.start, blk.len()));
        out.view_mut(((m + a) * n, 0), (n, blk.len())).copy_from(&eb.columns(blk.start, blk.len()));
    }
    Ok(out)
}

/// The part of `∇^tr φ` removed by the twistor projection:
/// `−Σ E*_α ⊗ b_q E_α D₋φ − Σ Ē*_α ⊗ a_q Ē_α D₊φ`, so that
/// `∇^tr = P + (this)`.
pub fn twistor_complement(space: &SectionSpace, q: usize) -> Result<DMatrix<C64>> {
    let m = space.m();
    if q > m {
        return Err(Error::GradeOutOfRange { q, m });
    }
    let (aq, bq) = twistor_coefficients(m, q);
    let p = twistor_pieces(space)?;
    let n = space.dim();
    let blk = space.block(q);
    let mut out = DMatrix::<C64>::zeros(2 * m * n, blk.len());
    for a in 0..m {
        let top = &p.e[a] * &p.dminus * C64::new(-bq, 0.0);
        let bottom = &p.ebar[a] * &p.dplus * C64::new(-aq, 0.0);
        out.view_mut((a * n, 0), (n, blk.len())).copy_from(&top.columns(blk.start, blk.len()));
        out.view_mut(((m + a) * n, 0), (n, blk.len())).copy_from(&bottom.columns(blk.start, blk.len()));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// spectra and kernels

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cluster {
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

/// Sorts and clusters eigenvalues; values within `1e−8(1+|λ|)` of the
/// running cluster mean merge.
pub fn cluster_eigenvalues(mut values: Vec<f64>) -> Vec<Cluster> {
    values.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<(f64, usize)> = Vec::new();
    for v in values {
        match out.last_mut() {
            Some((sum, n)) if (v - *sum / *n as f64).abs() <= SPECTRAL_TOL * (1.0 + v.abs()) => {
                *sum += v;
                *n += 1;
            }
            _ => out.push((v, 1)),
        }
    }
    out.into_iter().map(|(s, n)| Cluster { eigenvalue: s / n as f64, multiplicity: n }).collect()
}

fn hermitian_eigenvalues(a: DMatrix<C64>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    SymmetricEigen::new(a).eigenvalues.iter().copied().collect()
}

fn check_hermitian(op: &OperatorMatrix) -> Result<()> {
    let defect = op.hermitian_defect();
    if defect > DUAL_ASSEMBLY_TOL * (1.0 + op.matrix.norm()) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Lowest eigenvalues with multiplicities, covering at least `count`
/// eigenvalues (`count = 0`: all).
pub fn spectrum(op: &OperatorMatrix, count: usize) -> Result<Vec<Cluster>> {
    check_hermitian(op)?;
    let all = cluster_eigenvalues(hermitian_eigenvalues(op.matrix.clone()));
    Ok(truncate_clusters(all, count))
}

fn truncate_clusters(all: Vec<Cluster>, count: usize) -> Vec<Cluster> {
    if count == 0 {
        return all;
    }
    let mut seen = 0;
    all.into_iter()
        .take_while(|c| {
            let keep = seen < count;
            seen += c.multiplicity;
            keep
        })
        .collect()
}

/// Per-grade spectrum of a block-diagonal Hermitian operator.
pub fn block_spectrum(op: &OperatorMatrix, count: usize) -> Result<Vec<(usize, Cluster)>> {
    check_hermitian(op)?;
    let mut out = Vec::new();
    for (q, r) in &op.domain.segments {
        let blk = op.matrix.view((r.start, r.start), (r.len(), r.len())).into_owned();
        for c in truncate_clusters(cluster_eigenvalues(hermitian_eigenvalues(blk)), count) {
            out.push((*q, c));
        }
    }
    Ok(out)
}

/// Kernel dimension of an operator restricted to one domain grade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KernelBlock {
    pub q: usize,
    /// Singular values below tolerance.
    pub raw: usize,
    /// Kernel directions with negligible top-shell amplitude.
    pub certified: usize,
    /// Kernel directions with intermediate shell amplitude (truncation
    /// warning).
    pub ambiguous: usize,
}

/// Kernel dimension per domain grade: singular values of `A` restricted to
/// the grade-`q` columns below `tol`. `shell` marks domain positions in the
/// top truncation shell.
pub fn kernel_dim_with_shell(op: &OperatorMatrix, tol: f64, shell: &[bool], shell_tol: f64) -> Result<Vec<KernelBlock>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTruncation(format!("kernel tolerance {tol} must be positive")));
    }
    let mut out = Vec::new();
    for (q, r) in &op.domain.segments {
        let a = op.matrix.columns(r.start, r.len()).into_owned();
        if r.is_empty() {
            out.push(KernelBlock { q: *q, raw: 0, certified: 0, ambiguous: 0 });
            continue;
        }
        let eig = SymmetricEigen::new(a.adjoint() * &a);
        let kernel: Vec<usize> = (0..r.len()).filter(|&i| eig.eigenvalues[i] < tol * tol).collect();
        let raw = kernel.len();
        let (mut outside, mut mid) = (0, 0);
        if raw > 0 {
            let shell_rows: Vec<usize> = (0..r.len()).filter(|&i| shell.get(r.start + i).copied().unwrap_or(false)).collect();
            if !shell_rows.is_empty() {
                let v = DMatrix::from_fn(shell_rows.len(), raw, |i, j| eig.eigenvectors[(shell_rows[i], kernel[j])]);
                let sv = hermitian_eigenvalues(v.adjoint() * &v);
                for s2 in sv {
                    let s = s2.max(0.0).sqrt();
                    if s > shell_tol {
                        outside += 1;
                        if s < 1.0 - shell_tol.max(1e-6) {
                            mid += 1;
                        }
                    }
                }
            }
        }
        out.push(KernelBlock { q: *q, raw, certified: raw - outside, ambiguous: mid });
    }
    Ok(out)
}

/// Kernel dimension per domain grade for an operator on `space`.
pub fn kernel_dim_on(space: &SectionSpace, op: &OperatorMatrix, tol: f64) -> Result<Vec<KernelBlock>> {
    let shell: Vec<bool> = (0..space.dim()).map(|i| space.in_top_shell(i)).collect();
    let shell = if op.domain.dim() == space.dim() {
        shell
    } else {
        // operator defined on a single grade block
        let (q, _) = op.domain.segments[0].clone();
        shell[space.block(q)].to_vec()
    };
    kernel_dim_with_shell(op, tol, &shell, space.shell_tol())
}

/// Kernel dimension per domain grade, without shell certification.
pub fn kernel_dim(op: &OperatorMatrix, tol: f64) -> Result<Vec<usize>> {
    Ok(kernel_dim_with_shell(op, tol, &[], 1.0)?.into_iter().map(|b| b.raw).collect())
}

/// `C(m, q)` times the number of modes: the size of a grade block.
pub fn block_size(space: &SectionSpace, q: usize) -> usize {
    binomial(space.m(), q) * space.modes().len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{cr_alpha_bundle_with, heisenberg_model, TruncationSpec};

    fn heis(m: usize, k: i64) -> SectionSpace {
        SectionSpace::new(&heisenberg_model(m, k, TruncationSpec::new(if m == 1 { 2 } else { 1 }, 6)).unwrap()).unwrap()
    }

    fn comm(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
        a * b - b * a
    }

    #[test]
    fn dplus_kills_constants() {
        let s = heis(1, 0);
        let d = assemble_dplus(&s).unwrap().matrix;
        let zero = s.modes().position(&ModeLabel::Fourier(vec![(0, 0)])).unwrap();
        for sp in 0..2 {
            assert!(d.column(s.index(sp, zero)).norm() < 1e-15);
        }
    }

    #[test]
    fn complex_property_and_grading() {
        for k in [0, 1, -2] {
            let s = heis(2, k);
            let dp = assemble_dplus(&s).unwrap();
            let dm = assemble_dminus(&s).unwrap();
            assert!((&dp.matrix * &dp.matrix).norm() < ALGEBRAIC_TOL);
            assert!((&dm.matrix * &dm.matrix).norm() < ALGEBRAIC_TOL);
            assert!((dm.matrix.clone() - dp.matrix.adjoint()).norm() < ALGEBRAIC_TOL);
            let th = s.theta().matrix;
            assert!((comm(&th, &dp.matrix) + &dp.matrix * C64::new(2.0, 0.0)).norm() < ALGEBRAIC_TOL);
            assert!((comm(&th, &dm.matrix) - &dm.matrix * C64::new(2.0, 0.0)).norm() < ALGEBRAIC_TOL);
            assert_eq!(dp.verify_grading(), 0.0);
            assert_eq!(dm.verify_grading(), 0.0);
        }
    }

    #[test]
    fn dirac_square_is_block_diagonal() {
        let s = heis(2, 1);
        let d2 = assemble_dirac_squared(&s).unwrap();
        assert!(d2.verify_grading() < ALGEBRAIC_TOL);
        assert!(assemble_kohn_dirac(&s).unwrap().hermitian_defect() < ALGEBRAIC_TOL);
    }

    #[test]
    fn sub_laplacian_gram_form() {
        let s = heis(2, 2);
        let lap = assemble_sub_laplacian(&s).unwrap().matrix;
        let sum = assemble_rough_part(&s, true).unwrap().matrix + assemble_rough_part(&s, false).unwrap().matrix;
        assert!((lap - sum).norm() < ALGEBRAIC_TOL * 100.0);
    }

    #[test]
    fn nabla_t_two_ways() {
        let s = heis(1, 2);
        let a = assemble_nabla_t(&s).unwrap().matrix;
        let b = assemble_nabla_t_formula(&s).unwrap().matrix;
        assert!((a - b).norm() < DUAL_ASSEMBLY_TOL);
        let n = assemble_n_operator(&s).unwrap().matrix;
        assert!((n - DMatrix::identity(s.dim(), s.dim()) * C64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn twistor_lands_in_kernel_of_contraction() {
        let s = heis(2, 1);
        let c = contraction(&s);
        for q in 0..=2 {
            let p = assemble_twistor(&s, q).unwrap().matrix;
            assert!((&c * &p).norm() < ALGEBRAIC_TOL, "q = {q}");
        }
        assert!(matches!(assemble_twistor(&s, 3), Err(Error::GradeOutOfRange { .. })));
    }

    #[test]
    fn spectrum_of_zero_and_identity() {
        let s = heis(1, 0);
        let z = OperatorMatrix::square("0", &s, DMatrix::zeros(s.dim(), s.dim()), &[0]);
        assert_eq!(spectrum(&z, 0).unwrap(), vec![Cluster { eigenvalue: 0.0, multiplicity: s.dim() }]);
        let id = OperatorMatrix::square("1", &s, DMatrix::identity(s.dim(), s.dim()), &[0]);
        assert!(kernel_dim(&id, 1e-8).unwrap().iter().all(|&k| k == 0));
        let nonherm = OperatorMatrix::square("x", &s, assemble_dplus(&s).unwrap().matrix, &[1]);
        let nonherm = if nonherm.hermitian_defect() > 0.0 { nonherm } else { return };
        assert!(matches!(spectrum(&nonherm, 0), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn flat_kernel_is_constants() {
        let s = heis(1, 0);
        let d = assemble_kohn_dirac(&s).unwrap();
        let k = kernel_dim_on(&s, &d, SPECTRAL_TOL).unwrap();
        assert_eq!(k.iter().map(|b| b.certified).collect::<Vec<_>>(), vec![1, 1]);
    }

    #[test]
    fn positive_sector_kernel_only_on_top_grade() {
        let model = cr_alpha_bundle_with(TorusLattice::square(2), 1, 1, TruncationSpec::new(1, 5)).unwrap();
        let s = SectionSpace::new(&model).unwrap();
        let d = assemble_kohn_dirac(&s).unwrap();
        let k = kernel_dim_on(&s, &d, SPECTRAL_TOL).unwrap();
        assert_eq!(k.iter().map(|b| b.certified).collect::<Vec<_>>(), vec![0, 0, 1]);
        assert!(k.iter().all(|b| b.ambiguous == 0));
    }

    #[test]
    fn clustering_merges_close_values() {
        let c = cluster_eigenvalues(vec![1.0, 1.0 + 1e-12, 2.0, 0.0]);
        assert_eq!(c.len(), 3);
        assert_eq!(c[1].multiplicity, 2);
    }
}
