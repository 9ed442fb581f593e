//! Horizontal mode bases on which `∇_{E_α}` and `∇_{Ē_α}` act exactly.
//!
//! In a characteristic sector with `𝒩 = λ` the horizontal derivatives satisfy
//! `[∇_{E_α}, ∇_{Ē_β}] = −λ δ_αβ`. For `λ ≠ 0` they are realized by ladder
//! operators (`a|n⟩ = √n |n−1⟩`):
//!
//! ```text
//! λ > 0:  ∇_E =  √λ a,     ∇_Ē = −√λ a†
//! λ < 0:  ∇_E =  √|λ| a†,  ∇_Ē = −√|λ| a
//! ```
//!
//! and for `λ = 0` by Fourier modes on the base torus, where
//! `∇_E = (i k_x + k_y)/2`, `∇_Ē = (i k_x − k_y)/2`.

use std::collections::HashMap;

use crate::clifford::C64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeLabel {
    /// Wave numbers `(n_x, n_y)` per factor.
    Fourier(Vec<(i64, i64)>),
    /// Landau level per factor.
    Landau(Vec<usize>),
}

#[derive(Debug, Clone)]
enum Kind {
    Fourier { cutoff: usize, sides: Vec<(f64, f64)> },
    Landau { cutoff: usize, lambda: f64 },
}

/// An enumerated set of horizontal modes.
#[derive(Debug, Clone)]
pub struct ModeSpace {
    m: usize,
    kind: Kind,
    labels: Vec<ModeLabel>,
    index: HashMap<ModeLabel, usize>,
}

impl ModeSpace {
    /// Fourier modes `[−K, K]²` per factor, with torus side lengths `sides`.
    pub fn fourier(cutoff: usize, sides: Vec<(f64, f64)>) -> Self {
        let m = sides.len();
        let k = cutoff as i64;
        let mut labels = vec![Vec::new()];
        for _ in 0..m {
            let mut next = Vec::new();
            for prefix in &labels {
                for nx in -k..=k {
                    for ny in -k..=k {
                        let mut v: Vec<(i64, i64)> = prefix.clone();
                        v.push((nx, ny));
                        next.push(v);
                    }
                }
            }
            labels = next;
        }
        Self::build(m, Kind::Fourier { cutoff, sides }, labels.into_iter().map(ModeLabel::Fourier).collect())
    }

    /// Landau levels with total level at most `cutoff`.
    pub fn landau(m: usize, cutoff: usize, lambda: f64) -> Self {
        let mut labels = vec![Vec::new()];
        for _ in 0..m {
            let mut next = Vec::new();
            for prefix in &labels {
                let used: usize = prefix.iter().sum();
                for n in 0..=(cutoff - used) {
                    let mut v: Vec<usize> = prefix.clone();
                    v.push(n);
                    next.push(v);
                }
            }
            labels = next;
        }
        labels.sort_by(|a, b| a.iter().sum::<usize>().cmp(&b.iter().sum::<usize>()).then_with(|| a.cmp(b)));
        Self::build(m, Kind::Landau { cutoff, lambda }, labels.into_iter().map(ModeLabel::Landau).collect())
    }

    fn build(m: usize, kind: Kind, labels: Vec<ModeLabel>) -> Self {
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        ModeSpace { m, kind, labels, index }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn position(&self, label: &ModeLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Whether the horizontal derivatives are diagonal (Fourier sector).
    pub fn is_diagonal(&self) -> bool {
        matches!(self.kind, Kind::Fourier { .. })
    }

    pub fn lambda(&self) -> f64 {
        match self.kind {
            Kind::Fourier { .. } => 0.0,
            Kind::Landau { lambda, .. } => lambda,
        }
    }

    /// The same kind of space with the cutoff raised by one; derivatives of
    /// modes in `self` land inside it.
    pub fn enlarged(&self) -> Self {
        match &self.kind {
            Kind::Fourier { .. } => self.clone(),
            Kind::Landau { cutoff, lambda } => ModeSpace::landau(self.m, cutoff + 1, *lambda),
        }
    }

    /// Modes in the outermost shell of the truncation.
    pub fn in_top_shell(&self, pos: usize) -> bool {
        match (&self.kind, &self.labels[pos]) {
            (Kind::Fourier { cutoff, .. }, ModeLabel::Fourier(v)) => {
                v.iter().any(|&(x, y)| x.unsigned_abs() as usize == *cutoff || y.unsigned_abs() as usize == *cutoff)
            }
            (Kind::Landau { cutoff, .. }, ModeLabel::Landau(v)) => v.iter().sum::<usize>() == *cutoff,
            _ => unreachable!("label kind matches space kind"),
        }
    }

    /// `∇_{E_α}` (`holo = true`) or `∇_{Ē_α}` applied to mode `pos`, as a
    /// label with coefficient. `alpha` is 0-based.
    pub fn derivative(&self, holo: bool, alpha: usize, pos: usize) -> Option<(ModeLabel, C64)> {
        match (&self.kind, &self.labels[pos]) {
            (Kind::Fourier { sides, .. }, ModeLabel::Fourier(v)) => {
                let (lx, ly) = sides[alpha];
                let kx = 2.0 * std::f64::consts::PI * v[alpha].0 as f64 / lx;
                let ky = 2.0 * std::f64::consts::PI * v[alpha].1 as f64 / ly;
                let c = if holo { C64::new(ky, kx) } else { C64::new(-ky, kx) } * 0.5;
                Some((self.labels[pos].clone(), c))
            }
            (Kind::Landau { lambda, .. }, ModeLabel::Landau(v)) => {
                let root = lambda.abs().sqrt();
                // λ > 0: ∇_E lowers; λ < 0: ∇_E raises. ∇_Ē does the opposite.
                let lower = holo == (*lambda > 0.0);
                let sign = if holo { 1.0 } else { -1.0 };
                let n = v[alpha];
                let mut w = v.clone();
                if lower {
                    if n == 0 {
                        return None;
                    }
                    w[alpha] = n - 1;
                    Some((ModeLabel::Landau(w), C64::new(sign * root * (n as f64).sqrt(), 0.0)))
                } else {
                    w[alpha] = n + 1;
                    Some((ModeLabel::Landau(w), C64::new(sign * root * ((n + 1) as f64).sqrt(), 0.0)))
                }
            }
            _ => unreachable!("label kind matches space kind"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn landau_counts() {
        let s = ModeSpace::landau(2, 3, 1.0);
        assert_eq!(s.len(), 10);
        assert_eq!((0..s.len()).filter(|&p| s.in_top_shell(p)).count(), 4);
    }

    #[test]
    fn fourier_counts() {
        let s = ModeSpace::fourier(1, vec![(1.0, 1.0), (1.0, 1.0)]);
        assert_eq!(s.len(), 81);
    }

    #[test]
    fn ladder_commutator() {
        // [∇_E, ∇_Ē] = −λ on a low mode, computed through the enlarged space
        for lambda in [2.0, -3.0] {
            let s = ModeSpace::landau(1, 6, lambda);
            let start = s.position(&ModeLabel::Landau(vec![2])).unwrap();
            let apply = |holo: bool, pos: usize| s.derivative(holo, 0, pos).map(|(l, c)| (s.position(&l).unwrap(), c));
            let ebar_then_e = apply(false, start).and_then(|(p, c)| apply(true, p).map(|(q, d)| (q, c * d)));
            let e_then_ebar = apply(true, start).and_then(|(p, c)| apply(false, p).map(|(q, d)| (q, c * d)));
            let (p1, c1) = ebar_then_e.unwrap();
            let (p2, c2) = e_then_ebar.unwrap();
            assert_eq!(p1, start);
            assert_eq!(p2, start);
            assert!(((c1 - c2) - C64::new(-lambda, 0.0)).norm() < 1e-12);
        }
    }
}
