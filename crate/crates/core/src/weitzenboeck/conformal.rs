//! Pointwise CR-conformal covariance of the Kohn–Dirac and twistor
//! operators under `θ̃ = e^{2f}θ` on a flat model.
//!
//! Base coordinates are `(x_1, y_1, …, x_m, y_m)` with
//! `E_α = ½(∂_{x_α} − i∂_{y_α})`. The scale `f` and the test spinors are
//! trigonometric polynomials, so every derivative is exact.
//!
//! For `θ̃` the rescaled frame is `Ẽ_α = e^{−f}E_α`, Clifford multiplication
//! is `X ·̃ ψ = e^f X·ψ`, and the spinor derivative changes by
//!
//! ```text
//! ∇̃_X ψ = ∇_X ψ + ½ Σ_{j<k} g(S(X, s_j), s_k) s_j s_k · ψ + ½ ΔA(X) ψ
//! ```
//!
//! where `S = ∇̃ − ∇` on `H(M)` and `ΔA(X) = −iℓ (JX)(f)` is the change of
//! the connection on the determinant line.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clifford::{generator_matrix, mu, two_form_matrix, CliffordGenerator, HorizontalVector, SpinorBasis, C64};
use crate::error::{Error, Result};
use crate::models::{metric, PseudoHermitianModel};
use crate::operators::twistor_coefficients;

/// `amplitude · cos(wave · x + phase)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub wave: Vec<f64>,
    pub phase: f64,
}

/// A trigonometric polynomial `f` on the base.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalScale {
    m: usize,
    terms: Vec<TrigTerm>,
}

impl ConformalScale {
    pub fn new(m: usize, terms: Vec<TrigTerm>) -> Result<Self> {
        for t in &terms {
            if t.wave.len() != 2 * m {
                return Err(Error::InvalidScale(format!("wave vector has {} entries, expected {}", t.wave.len(), 2 * m)));
            }
            if !(t.amplitude.is_finite() && t.phase.is_finite() && t.wave.iter().all(|w| w.is_finite())) {
                return Err(Error::InvalidScale("non-finite coefficient".into()));
            }
        }
        Ok(ConformalScale { m, terms })
    }

    pub fn zero(m: usize) -> Self {
        ConformalScale { m, terms: Vec::new() }
    }

    /// Parses sums of `a*cos(...)` and `a*sin(...)` with arguments linear in
    /// `x1, y1, …, xm, ym`, e.g. `0.3*cos(x1) - 0.1*sin(2*x1 + y2 + 0.5)`.
    pub fn parse(m: usize, text: &str) -> Result<Self> {
        let terms = Parser::new(m, text).expression()?;
        ConformalScale::new(m, terms)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    /// Whether every derivative vanishes identically.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == 0.0 || t.wave.iter().all(|&w| w == 0.0))
    }

    fn arg(t: &TrigTerm, x: &[f64]) -> f64 {
        t.wave.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + t.phase
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.amplitude * Self::arg(t, x).cos()).sum()
    }

    /// Real partial derivatives `(∂_{x_1}f, ∂_{y_1}f, …)`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; 2 * self.m];
        for t in &self.terms {
            let s = -t.amplitude * Self::arg(t, x).sin();
            for (gj, w) in g.iter_mut().zip(&t.wave) {
                *gj += s * w;
            }
        }
        g
    }

    /// `(E_α(f), Ē_α(f))`, `alpha` 0-based.
    pub fn complex_derivatives(&self, x: &[f64], alpha: usize) -> (C64, C64) {
        let g = self.gradient(x);
        let (fx, fy) = (g[2 * alpha], g[2 * alpha + 1]);
        (C64::new(fx, -fy) * 0.5, C64::new(fx, fy) * 0.5)
    }
}

struct Parser<'a> {
    m: usize,
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(m: usize, src: &'a str) -> Self {
        Parser { m, src, pos: 0 }
    }

    fn err<T>(&self, what: &str) -> Result<T> {
        Err(Error::InvalidScale(format!("{what} at offset {} in {:?} (only sums of a*cos(...) and a*sin(...) are accepted)", self.pos, self.src)))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(0, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Option<f64> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .char_indices()
            .take_while(|&(i, c)| c.is_ascii_digit() || c == '.' || ((c == 'e' || c == 'E') && i > 0))
            .map(|(i, c)| i + c.len_utf8())
            .last()?;
        let v = rest[..len].parse().ok()?;
        self.pos += len;
        Some(v)
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.chars().take_while(|c| c.is_ascii_alphanumeric()).map(char::len_utf8).sum();
        self.pos += len;
        rest[..len].to_string()
    }

    fn sign(&mut self) -> f64 {
        let mut s = 1.0;
        loop {
            if self.eat('-') {
                s = -s;
            } else if !self.eat('+') {
                return s;
            }
        }
    }

    fn expression(&mut self) -> Result<Vec<TrigTerm>> {
        let mut terms = Vec::new();
        loop {
            let s = self.sign();
            let amp = match self.number() {
                Some(a) => {
                    if !self.eat('*') {
                        // bare constant: contributes nothing to derivatives
                        terms.push(TrigTerm { amplitude: s * a, wave: vec![0.0; 2 * self.m], phase: 0.0 });
                        if self.peek().is_none() {
                            return Ok(terms);
                        }
                        if matches!(self.peek(), Some('+') | Some('-')) {
                            continue;
                        }
                        return self.err("unexpected token");
                    }
                    s * a
                }
                None => s,
            };
            let func = self.ident();
            let shift = match func.as_str() {
                "cos" => 0.0,
                "sin" => -std::f64::consts::FRAC_PI_2,
                "" => return self.err("expected cos or sin"),
                other => return self.err(&format!("unsupported function {other:?}")),
            };
            if !self.eat('(') {
                return self.err("expected '('");
            }
            let (wave, phase) = self.linear()?;
            if !self.eat(')') {
                return self.err("expected ')'");
            }
            terms.push(TrigTerm { amplitude: amp, wave, phase: phase + shift });
            match self.peek() {
                None => return Ok(terms),
                Some('+') | Some('-') => continue,
                Some(_) => return self.err("unexpected token"),
            }
        }
    }

    fn linear(&mut self) -> Result<(Vec<f64>, f64)> {
        let mut wave = vec![0.0; 2 * self.m];
        let mut phase = 0.0;
        loop {
            let s = self.sign();
            let coef = self.number();
            if coef.is_some() {
                self.eat('*');
            }
            match self.peek() {
                Some('x') | Some('y') => {
                    let id = self.ident();
                    let slot = id[1..].parse::<usize>().ok().filter(|&a| a >= 1 && a <= self.m);
                    let Some(a) = slot else { return self.err(&format!("unknown variable {id:?}")) };
                    let j = 2 * (a - 1) + usize::from(id.starts_with('y'));
                    wave[j] += s * coef.unwrap_or(1.0);
                }
                _ => match coef {
                    Some(c) => phase += s * c,
                    None => return self.err("expected a number or variable"),
                },
            }
            if !matches!(self.peek(), Some('+') | Some('-')) {
                return Ok((wave, phase));
            }
        }
    }
}

/// A trigonometric spinor field `Σ c · e^{i w·x} δ_S`.
#[derive(Debug, Clone)]
pub struct SpinorField {
    m: usize,
    /// `(coefficient, wave vector, spinor basis position)`.
    pub terms: Vec<(C64, Vec<f64>, usize)>,
}

impl SpinorField {
    pub fn new(m: usize, terms: Vec<(C64, Vec<f64>, usize)>) -> Result<Self> {
        let dim = 1usize << m;
        for (_, w, p) in &terms {
            if w.len() != 2 * m || *p >= dim {
                return Err(Error::DimensionMismatch { expected: m, found: w.len() / 2 });
            }
        }
        Ok(SpinorField { m, terms })
    }

    /// A pseudo-random field of grade `q` with integer wave numbers.
    pub fn random(m: usize, q: usize, n_terms: usize, rng: &mut impl Rng) -> Result<Self> {
        let basis = SpinorBasis::new(m)?;
        let block = basis.block(q);
        let terms = (0..n_terms)
            .map(|_| {
                let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let w = (0..2 * m).map(|_| rng.random_range(-2i32..=2) as f64).collect();
                (c, w, rng.random_range(block.clone()))
            })
            .collect();
        SpinorField::new(m, terms)
    }

    pub fn value(&self, x: &[f64]) -> DVector<C64> {
        let mut v = DVector::zeros(1 << self.m);
        for (c, w, p) in &self.terms {
            let a: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
            v[*p] += c * C64::new(0.0, a).exp();
        }
        v
    }

    /// `E_α φ` (`holo`) or `Ē_α φ` at `x`, `alpha` 0-based.
    pub fn derivative(&self, x: &[f64], holo: bool, alpha: usize) -> DVector<C64> {
        let mut v = DVector::zeros(1 << self.m);
        for (c, w, p) in &self.terms {
            let a: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
            let (kx, ky) = (w[2 * alpha], w[2 * alpha + 1]);
            let d = if holo { C64::new(ky, kx) } else { C64::new(-ky, kx) } * 0.5;
            v[*p] += c * d * C64::new(0.0, a).exp();
        }
        v
    }
}

/// Pointwise data of one spinor `ψ = e^{p f} φ` at a sample point.
struct Jet {
    value: DVector<C64>,
    /// `∇_{E_α}ψ` and `∇_{Ē_α}ψ`.
    holo: Vec<DVector<C64>>,
    anti: Vec<DVector<C64>>,
}

struct Frame {
    e: Vec<DMatrix<C64>>,
    ebar: Vec<DMatrix<C64>>,
}

impl Frame {
    fn new(m: usize) -> Result<Self> {
        Ok(Frame {
            e: (1..=m).map(|a| generator_matrix(m, CliffordGenerator::Create(a))).collect::<Result<_>>()?,
            ebar: (1..=m).map(|a| generator_matrix(m, CliffordGenerator::Annihilate(a))).collect::<Result<_>>()?,
        })
    }
}

fn unit(m: usize, holo: bool, alpha: usize) -> HorizontalVector<C64> {
    let z = C64::new(0.0, 0.0);
    let mut h = HorizontalVector { holo: vec![z; m], antiholo: vec![z; m] };
    if holo {
        h.holo[alpha] = C64::new(1.0, 0.0);
    } else {
        h.antiholo[alpha] = C64::new(1.0, 0.0);
    }
    h
}

/// Everything about `f` needed at one point.
struct ScaleAt {
    value: f64,
    e: Vec<C64>,
    ebar: Vec<C64>,
}

impl ScaleAt {
    fn new(f: &ConformalScale, x: &[f64]) -> Self {
        let (e, ebar) = (0..f.m).map(|a| f.complex_derivatives(x, a)).unzip();
        ScaleAt { value: f.value(x), e, ebar }
    }

    fn vector_derivative(&self, v: &HorizontalVector<C64>) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..self.e.len() {
            acc += v.holo[a] * self.e[a] + v.antiholo[a] * self.ebar[a];
        }
        acc
    }

    /// `S(X, Y)` for `X` of pure type.
    fn s_tensor(&self, x: &HorizontalVector<C64>, x_holo: bool, y: &HorizontalVector<C64>) -> HorizontalVector<C64> {
        let m = self.e.len();
        let z = C64::new(0.0, 0.0);
        let (y10, y01) = (
            HorizontalVector { holo: y.holo.clone(), antiholo: vec![z; m] },
            HorizontalVector { holo: vec![z; m], antiholo: y.antiholo.clone() },
        );
        let xf = self.vector_derivative(x);
        let mut out = HorizontalVector { holo: vec![z; m], antiholo: vec![z; m] };
        if x_holo {
            // 2X(f)Y₁₀ + 2Y₁₀(f)X − 2g(X, Y₀₁) grad₀₁ f, grad₀₁ f = 2Σ E_α(f) Ē_α
            let yf = self.vector_derivative(&y10);
            let gx = metric(x, &y01);
            for a in 0..m {
                out.holo[a] += xf * y10.holo[a] * 2.0 + yf * x.holo[a] * 2.0;
                out.antiholo[a] -= gx * self.e[a] * 4.0;
            }
        } else {
            let yf = self.vector_derivative(&y01);
            let gx = metric(x, &y10);
            for a in 0..m {
                out.antiholo[a] += xf * y01.antiholo[a] * 2.0 + yf * x.antiholo[a] * 2.0;
                out.holo[a] -= gx * self.ebar[a] * 4.0;
            }
        }
        out
    }

    /// Change of the spinor connection along `E_α` (`holo`) or `Ē_α`.
    fn connection_change(&self, m: usize, ell: i64, holo: bool, alpha: usize) -> Result<DMatrix<C64>> {
        let x = unit(m, holo, alpha);
        let form = |u: &HorizontalVector<C64>, v: &HorizontalVector<C64>| metric(&self.s_tensor(&x, holo, u), v);
        let rot = two_form_matrix(m, form)? * C64::new(0.5, 0.0);
        let da = (if holo { self.e[alpha] } else { -self.ebar[alpha] }) * ell as f64;
        let n = 1 << m;
        Ok(rot + DMatrix::<C64>::identity(n, n) * (da * 0.5))
    }
}

fn jet(field: &SpinorField, f: &ScaleAt, p: f64, x: &[f64]) -> Jet {
    let m = field.m;
    let w = (p * f.value).exp();
    let phi = field.value(x);
    let holo = (0..m).map(|a| (field.derivative(x, true, a) + &phi * (f.e[a] * p)) * C64::from(w)).collect();
    let anti = (0..m).map(|a| (field.derivative(x, false, a) + &phi * (f.ebar[a] * p)) * C64::from(w)).collect();
    Jet { value: phi * C64::new(w, 0.0), holo, anti }
}

struct Transformed {
    /// `∇̃_{E_α}ψ`, `∇̃_{Ē_α}ψ` in the unscaled frame.
    holo: Vec<DVector<C64>>,
    anti: Vec<DVector<C64>>,
    scale: f64,
}

fn transform(j: &Jet, gamma_e: &[DMatrix<C64>], gamma_ebar: &[DMatrix<C64>], f_value: f64) -> Transformed {
    Transformed {
        holo: j.holo.iter().zip(gamma_e).map(|(d, g)| d + g * &j.value).collect(),
        anti: j.anti.iter().zip(gamma_ebar).map(|(d, g)| d + g * &j.value).collect(),
        scale: (-f_value).exp(),
    }
}

fn dplus(fr: &Frame, anti: &[DVector<C64>]) -> DVector<C64> {
    anti.iter().zip(&fr.e).map(|(d, e)| e * d * C64::new(2.0, 0.0)).fold(DVector::zeros(anti[0].len()), |a, b| a + b)
}

fn dminus(fr: &Frame, holo: &[DVector<C64>]) -> DVector<C64> {
    holo.iter().zip(&fr.ebar).map(|(d, e)| e * d * C64::new(2.0, 0.0)).fold(DVector::zeros(holo[0].len()), |a, b| a + b)
}

/// Result of scanning one covariance law over exponents.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentScan {
    pub law: String,
    pub q: usize,
    pub predicted: f64,
    pub defect_at_predicted: f64,
    /// Smallest defect over integer perturbations of the exponent.
    pub min_perturbed_defect: f64,
    /// Whether the law depends on the exponent at all for this grade.
    pub sensitive: bool,
}

impl ExponentScan {
    pub fn rejects_perturbations(&self, tol: f64) -> bool {
        !self.sensitive || self.min_perturbed_defect > tol
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformalReport {
    pub m: usize,
    pub ell: i64,
    pub points: usize,
    /// Largest pointwise defect of `D̃(e^{−(m+1)f}φ) = e^{−(m+2)f}D_θφ` on
    /// `Σ^{−ℓ}`; `None` if `−ℓ` is not a `Θ`-eigenvalue.
    pub compare_defect: Option<f64>,
    pub scans: Vec<ExponentScan>,
}

impl ConformalReport {
    pub fn max_defect(&self) -> f64 {
        self.scans.iter().map(|s| s.defect_at_predicted).chain(self.compare_defect).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_defect() <= tol && self.scans.iter().all(|s| s.rejects_perturbations(1e3 * tol))
    }
}

/// Offsets used for the soundness scan.
pub const SCAN_OFFSETS: [f64; 6] = [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0];

/// Checks the covariance laws at `n_points` seeded sample points with
/// seeded random test spinors.
pub fn conformal_check(model: &PseudoHermitianModel, ell: i64, f: &ConformalScale, n_points: usize, seed: u64) -> Result<ConformalReport> {
    let m = model.m;
    if model.rho.norm() != 0.0 || model.tau.norm() != 0.0 || model.scal != 0.0 {
        return Err(Error::InvalidModel("conformal checks need a flat model".into()));
    }
    if f.m() != m {
        return Err(Error::DimensionMismatch { expected: m, found: f.m() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> =
        (0..n_points).map(|_| (0..2 * m).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()).collect();
    let fields = (0..=m).map(|q| SpinorField::random(m, q, 3, &mut rng)).collect::<Result<Vec<_>>>()?;
    conformal_check_with(m, ell, f, &points, &fields)
}

/// As [`conformal_check`] with explicit points and one test field per grade.
pub fn conformal_check_with(
    m: usize,
    ell: i64,
    f: &ConformalScale,
    points: &[Vec<f64>],
    fields: &[SpinorField],
) -> Result<ConformalReport> {
    if fields.len() != m + 1 {
        return Err(Error::DimensionMismatch { expected: m + 1, found: fields.len() });
    }
    let fr = Frame::new(m)?;
    let lf = ell as f64;
    let mut compare: Option<f64> = None;
    let q_compare = ((m as i64 + ell) % 2 == 0 && ell.abs() <= m as i64).then(|| ((m as i64 + ell) / 2) as usize);

    let mut scans = Vec::new();
    for q in 0..=m {
        let muq = mu(m, q) as f64;
        let (aq, bq) = twistor_coefficients(m, q);
        // exponents p in ψ = e^{p f} φ
        let laws: [(&str, f64); 4] = [
            ("D+", -(m as f64 + 1.0 - (muq + lf) / 2.0)),
            ("D-", -(m as f64 + 1.0 + (muq + lf) / 2.0)),
            ("P10", 1.0 - (lf - muq) / 2.0),
            ("P01", 1.0 - (muq - lf) / 2.0),
        ];
        for (law, predicted) in laws {
            let defect = |p: f64| -> Result<f64> {
                let mut worst = 0.0f64;
                for x in points {
                    let s = ScaleAt::new(f, x);
                    let ge = (0..m).map(|a| s.connection_change(m, ell, true, a)).collect::<Result<Vec<_>>>()?;
                    let gb = (0..m).map(|a| s.connection_change(m, ell, false, a)).collect::<Result<Vec<_>>>()?;
                    let plain = jet(&fields[q], &s, 0.0, x);
                    let j = jet(&fields[q], &s, p, x);
                    let t = transform(&j, &ge, &gb, s.value);
                    let out_w = ((p - 1.0) * s.value).exp();
                    let d = match law {
                        "D+" => dplus(&fr, &t.anti) * C64::from(t.scale) - dplus(&fr, &plain.anti) * C64::from(out_w),
                        "D-" => dminus(&fr, &t.holo) * C64::from(t.scale) - dminus(&fr, &plain.holo) * C64::from(out_w),
                        "P10" => {
                            let dm_t = dminus(&fr, &t.holo) * C64::from(t.scale);
                            let dm = dminus(&fr, &plain.holo);
                            let mut acc = 0.0f64;
                            for a in 0..m {
                                let lhs = &t.holo[a] * C64::from(t.scale) + &fr.e[a] * &dm_t * C64::new(bq, 0.0);
                                let rhs = (&plain.holo[a] + &fr.e[a] * &dm * C64::new(bq, 0.0)) * C64::from(out_w);
                                acc = acc.max((lhs - rhs).norm());
                            }
                            worst = worst.max(acc);
                            continue;
                        }
                        _ => {
                            let dp_t = dplus(&fr, &t.anti) * C64::from(t.scale);
                            let dp = dplus(&fr, &plain.anti);
                            let mut acc = 0.0f64;
                            for a in 0..m {
                                let lhs = &t.anti[a] * C64::from(t.scale) + &fr.ebar[a] * &dp_t * C64::new(aq, 0.0);
                                let rhs = (&plain.anti[a] + &fr.ebar[a] * &dp * C64::new(aq, 0.0)) * C64::from(out_w);
                                acc = acc.max((lhs - rhs).norm());
                            }
                            worst = worst.max(acc);
                            continue;
                        }
                    };
                    worst = worst.max(d.norm());
                }
                Ok(worst)
            };
            let at = defect(predicted)?;
            let mut min_off = f64::INFINITY;
            for off in SCAN_OFFSETS {
                min_off = min_off.min(defect(predicted + off)?);
            }
            let sensitive = !f.is_constant() && law_sensitive(law, m, q);
            scans.push(ExponentScan { law: law.into(), q, predicted, defect_at_predicted: at, min_perturbed_defect: min_off, sensitive });
        }

        if Some(q) == q_compare {
            let mut worst = 0.0f64;
            for x in points {
                let s = ScaleAt::new(f, x);
                let ge = (0..m).map(|a| s.connection_change(m, ell, true, a)).collect::<Result<Vec<_>>>()?;
                let gb = (0..m).map(|a| s.connection_change(m, ell, false, a)).collect::<Result<Vec<_>>>()?;
                let plain = jet(&fields[q], &s, 0.0, x);
                let j = jet(&fields[q], &s, -(m as f64 + 1.0), x);
                let t = transform(&j, &ge, &gb, s.value);
                let lhs = (dplus(&fr, &t.anti) + dminus(&fr, &t.holo)) * C64::from(t.scale);
                let rhs = (dplus(&fr, &plain.anti) + dminus(&fr, &plain.holo)) * C64::from((-(m as f64 + 2.0) * s.value).exp());
                worst = worst.max((lhs - rhs).norm());
            }
            compare = Some(worst);
        }
    }
    Ok(ConformalReport { m, ell, points: points.len(), compare_defect: compare, scans })
}

/// Grades where the exponent enters the law at all: `D₊` and `P₁₀` vanish
/// identically on the top grade, `D₋` and `P₀₁` on the bottom grade.
fn law_sensitive(law: &str, m: usize, q: usize) -> bool {
    match law {
        "D+" | "P10" => q < m,
        _ => q > 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{heisenberg_model, TruncationSpec};

    #[test]
    fn parse_accepts_trig_sums() {
        let f = ConformalScale::parse(2, "0.3*cos(x1) - 0.1*sin(2*x1 + y2 + 0.5) + 1").unwrap();
        assert_eq!(f.terms().len(), 3);
        assert_eq!(f.terms()[1].wave, vec![2.0, 0.0, 0.0, 1.0]);
        let x = [0.4, 0.0, 0.0, 0.2];
        let expect = 0.3 * 0.4f64.cos() - 0.1 * (0.8f64 + 0.2 + 0.5).sin() + 1.0;
        assert!((f.value(&x) - expect).abs() < 1e-15);
    }

    #[test]
    fn parse_rejects_non_trig() {
        for bad in ["exp(x1)", "x1*x1", "0.3*cos(x3)", "cos(x1", "0.2*tan(y1)"] {
            assert!(matches!(ConformalScale::parse(2, bad), Err(Error::InvalidScale(_))), "{bad}");
        }
    }

    #[test]
    fn gradient_is_exact() {
        let f = ConformalScale::parse(1, "0.3*cos(x1 + 2*y1)").unwrap();
        let x = [0.7, -0.2];
        let g = f.gradient(&x);
        let a: f64 = 0.7 - 0.4;
        assert!((g[0] + 0.3 * a.sin()).abs() < 1e-15);
        assert!((g[1] + 0.6 * a.sin()).abs() < 1e-15);
    }

    #[test]
    fn identity_scale_has_zero_defect() {
        let h = heisenberg_model(1, 0, TruncationSpec::default()).unwrap();
        let r = conformal_check(&h, -1, &ConformalScale::zero(1), 5, 1).unwrap();
        assert_eq!(r.compare_defect, Some(0.0));
        assert!(r.scans.iter().all(|s| s.defect_at_predicted == 0.0));
    }

    #[test]
    fn single_cosine_m1() {
        let h = heisenberg_model(1, 0, TruncationSpec::default()).unwrap();
        let f = ConformalScale::parse(1, "0.3*cos(x1)").unwrap();
        let r = conformal_check(&h, -1, &f, 20, 7).unwrap();
        assert!(r.compare_defect.unwrap() <= 1e-9, "{r:?}");
        assert!(r.passes(1e-9), "{r:#?}");
    }
}
