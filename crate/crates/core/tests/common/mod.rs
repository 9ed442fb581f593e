//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's operator assembly: the exterior
//! algebra, the ladder operators and the `∂̄` complex are rebuilt from
//! scratch in a basis indexed directly by subset bitmasks.

#![allow(dead_code)]

use nalgebra::DMatrix;

/// Exterior multiplication `ε_α` on `Λ•C^m`, rows and columns indexed by
/// bitmask, with the Jordan–Wigner sign `(−1)^{#{β < α : β ∈ S}}`.
pub fn wedge(m: usize, alpha: usize) -> DMatrix<i64> {
    let n = 1usize << m;
    let bit = 1usize << (alpha - 1);
    let mut a = DMatrix::zeros(n, n);
    for s in 0..n {
        if s & bit == 0 {
            let below = (s & (bit - 1)).count_ones();
            a[(s | bit, s)] = if below % 2 == 0 { 1 } else { -1 };
        }
    }
    a
}

/// Interior multiplication `ι_α = ε_α^T`.
pub fn contract(m: usize, alpha: usize) -> DMatrix<i64> {
    wedge(m, alpha).transpose()
}

pub fn grade_of_mask(s: usize) -> usize {
    s.count_ones() as usize
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

fn to_f64(a: &DMatrix<i64>) -> DMatrix<f64> {
    a.map(|x| x as f64)
}

fn rank(a: &DMatrix<f64>, tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    a.clone().svd(false, false).singular_values.iter().filter(|&&s| s > tol).count()
}

/// Truncated bosonic ladder on levels `0..n`: returns `(a, a†)`, exact on
/// every level below `n − 1`.
fn ladder(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut lower = DMatrix::zeros(n, n);
    for k in 1..n {
        lower[(k - 1, k)] = (k as f64).sqrt();
    }
    let raise = lower.transpose();
    (lower, raise)
}

/// `A_α` acting on the `α`-th tensor factor of `(C^n)^{⊗m}`.
fn on_factor(a: &DMatrix<f64>, alpha: usize, m: usize, n: usize) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(n, n);
    let mut out = DMatrix::<f64>::identity(1, 1);
    for beta in 1..=m {
        out = out.kronecker(if beta == alpha { a } else { &id });
    }
    out
}

/// `h^q` of one Landau sector by brute force.
///
/// The twist `t = s·c` fixes the sector: for `t > 0` the operator is
/// `∂̄ = Σ ε_α a†_α`, for `t < 0` it is `∂̄ = Σ ε_α a_α`. Harmonic forms are
/// searched among vectors with every level below `levels`; both `∂̄` and
/// `∂̄*` are then exact because the ambient space carries one extra level.
/// The count is multiplied by the lowest-level degeneracy `|t|^m`.
pub fn landau_cohomology(m: usize, t: i64, levels: usize) -> Vec<u64> {
    assert!(t != 0);
    let n = levels + 1;
    let (lower, raise) = ladder(n);
    let fock = n.pow(m as u32);
    let dim = fock << m;
    let mut dbar = DMatrix::<f64>::zeros(dim, dim);
    for alpha in 1..=m {
        let lad = if t > 0 { &raise } else { &lower };
        dbar += to_f64(&wedge(m, alpha)).kronecker(&on_factor(lad, alpha, m, n));
    }
    let dstar = dbar.transpose();
    let stacked = {
        let mut s = DMatrix::zeros(2 * dim, dim);
        s.view_mut((0, 0), (dim, dim)).copy_from(&dbar);
        s.view_mut((dim, 0), (dim, dim)).copy_from(&dstar);
        s
    };
    let in_core = |f: usize| {
        let mut f = f;
        (0..m).all(|_| {
            let ok = f % n < levels;
            f /= n;
            ok
        })
    };
    let degeneracy = t.unsigned_abs().pow(m as u32);
    (0..=m)
        .map(|q| {
            let cols: Vec<usize> = (0..dim).filter(|&i| grade_of_mask(i / fock) == q && in_core(i % fock)).collect();
            let sub = stacked.select_columns(&cols);
            (cols.len() - rank(&sub, 1e-9)) as u64 * degeneracy
        })
        .collect()
}

/// `h^q` of the untwisted sector on a flat torus by summing, over Fourier
/// modes in `[−k, k]^{2m}`, the kernel of `ε(w)ε(w)* + ε(w)*ε(w)` on grade
/// `q` with `w_α = k_{x,α} + i k_{y,α}`.
pub fn flat_cohomology(m: usize, k: i64) -> Vec<u64> {
    let side = (2 * k + 1) as usize;
    let total = side.pow(2 * m as u32);
    let wedges: Vec<DMatrix<f64>> = (1..=m).map(|a| to_f64(&wedge(m, a))).collect();
    let mut h = vec![0u64; m + 1];
    for idx in 0..total {
        let mut r = idx;
        let mut re = DMatrix::<f64>::zeros(1 << m, 1 << m);
        let mut im = DMatrix::<f64>::zeros(1 << m, 1 << m);
        for w in &wedges {
            let kx = (r % side) as i64 - k;
            r /= side;
            let ky = (r % side) as i64 - k;
            r /= side;
            re += w * kx as f64;
            im += w * ky as f64;
        }
        // (re + i im) acting on a complex vector, as a real 2x2 block matrix
        let d = block_complex(&re, &im);
        let lap = &d * d.transpose() + d.transpose() * &d;
        for q in 0..=m {
            let cols: Vec<usize> = (0..(1usize << m)).filter(|&s| grade_of_mask(s) == q).flat_map(|s| [s, s + (1 << m)]).collect();
            let sub = lap.select_columns(&cols).select_rows(&cols);
            h[q] += ((cols.len() - rank(&sub, 1e-9)) / 2) as u64;
        }
    }
    h
}

fn block_complex(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<f64> {
    let n = re.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(re);
    out.view_mut((n, n), (n, n)).copy_from(re);
    out.view_mut((0, n), (n, n)).copy_from(&(-im));
    out.view_mut((n, 0), (n, n)).copy_from(im);
    out
}

/// Sector cohomology of the torus bundle with flux `c`: the flat sector
/// gives `C(m, q)`, twisted sectors go through [`landau_cohomology`].
pub fn sector_cohomology(m: usize, c: i64, s: i64, levels: usize) -> Vec<u64> {
    if s == 0 {
        flat_cohomology(m, 1)
    } else {
        landau_cohomology(m, s * c, levels)
    }
}
