//! Property tests over random inputs.

mod common;

use crspin::clifford::{apply_generator, gaussian, CliffordGenerator, GaussianRational, SpinorVector};
use crspin::config::RunConfig;
use crspin::io::{read_matrix_market, sci, write_matrix_market};
use crspin::models::sphere_model_with_scal;
use crspin::operators::cluster_eigenvalues;
use crspin::vanishing::{qhat, vanishing_verdicts};
use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::Rational64;
use proptest::prelude::*;

fn spinor(m: usize) -> impl Strategy<Value = SpinorVector<GaussianRational>> {
    prop::collection::vec((-5i64..=5, -5i64..=5), 1usize << m)
        .prop_map(move |c| SpinorVector::from_coeffs(m, c.into_iter().map(|(a, b)| gaussian(a, b)).collect()).unwrap())
}

fn m_and_spinor() -> impl Strategy<Value = (usize, SpinorVector<GaussianRational>)> {
    (1usize..=4).prop_flat_map(|m| (Just(m), spinor(m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn create_is_nilpotent_and_canonical((m, phi) in m_and_spinor(), a in 1usize..=4, b in 1usize..=4) {
        let (a, b) = (1 + (a - 1) % m, 1 + (b - 1) % m);
        let e = |g, v: &SpinorVector<GaussianRational>| apply_generator(g, v).unwrap();
        let ea = CliffordGenerator::Create(a);
        prop_assert!(e(ea, &e(ea, &phi)).is_zero());
        let eb = CliffordGenerator::Annihilate(b);
        let anti = e(ea, &e(eb, &phi)).add(&e(eb, &e(ea, &phi))).unwrap();
        let expect = if a == b { phi.scale(&gaussian(-1, 0)) } else { SpinorVector::zero(m).unwrap() };
        prop_assert_eq!(anti, expect);
    }

    #[test]
    fn generators_are_adjoint((m, phi) in m_and_spinor(), seed in any::<u64>(), a in 1usize..=4) {
        let a = 1 + (a - 1) % m;
        let psi = SpinorVector::from_coeffs(m, (0..1usize << m).map(|i| gaussian(((seed >> (i % 60)) & 7) as i64 - 3, i as i64 % 3)).collect()).unwrap();
        let lhs = apply_generator(CliffordGenerator::Create(a), &phi).unwrap().inner(&psi).unwrap();
        let rhs = phi.inner(&apply_generator(CliffordGenerator::Annihilate(a), &psi).unwrap()).unwrap();
        prop_assert_eq!(lhs, -rhs);
    }

    #[test]
    fn wedge_reference_squares_to_zero(m in 1usize..=6, a in 1usize..=6) {
        let a = 1 + (a - 1) % m;
        let w = common::wedge(m, a);
        prop_assert!((&w * &w).iter().all(|&x| x == 0));
    }

    #[test]
    fn qhat_matches_its_definition(m in 1usize..=12, ell in -20i64..=20) {
        let q = qhat(m, ell);
        let (mi, n) = (m as i64, 2 * (m as i64 + 2));
        prop_assert_eq!(q * Rational64::from_integer(n), Rational64::from_integer(mi * (mi + ell + 2)));
    }

    #[test]
    fn sphere_verdicts_are_scale_invariant(m in 2usize..=6, ell in -8i64..=8, scal in 0.01f64..100.0) {
        let a = vanishing_verdicts(&sphere_model_with_scal(m, 1.0).unwrap(), ell).unwrap();
        let b = vanishing_verdicts(&sphere_model_with_scal(m, scal).unwrap(), ell).unwrap();
        for q in 0..=m {
            prop_assert_eq!(a.row(q).unwrap().verdict.is_forced(), b.row(q).unwrap().verdict.is_forced());
        }
        if ell.abs() <= m as i64 + 2 {
            prop_assert!((1..m).all(|q| b.row(q).unwrap().verdict.is_forced()));
        }
    }

    #[test]
    fn sci_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(sci(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn matrix_market_round_trips(rows in 1usize..6, cols in 1usize..6, vals in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3, 0u8..3), 36)) {
        let a = DMatrix::from_fn(rows, cols, |r, c| {
            let (re, im, keep) = vals[r * 6 + c];
            if keep == 0 { Complex::new(0.0, 0.0) } else { Complex::new(re, im) }
        });
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &a, "random").unwrap();
        prop_assert_eq!(read_matrix_market(std::io::Cursor::new(buf)).unwrap(), a);
    }

    #[test]
    fn clusters_preserve_count(vals in prop::collection::vec(-10.0f64..10.0, 0..40)) {
        let n = vals.len();
        let clusters = cluster_eigenvalues(vals);
        prop_assert_eq!(clusters.iter().map(|c| c.multiplicity).sum::<usize>(), n);
        prop_assert!(clusters.windows(2).all(|w| w[0].eigenvalue < w[1].eigenvalue));
    }

    #[test]
    fn positive_tolerances_parse(t in 1e-15f64..1.0) {
        let src = format!("[model]\nkind = \"heisenberg\"\nm = 1\n[tolerances]\nspectral = {t:e}\n");
        prop_assert_eq!(RunConfig::parse(&src).unwrap().tolerances.spectral, t);
    }

    #[test]
    fn landau_oracle_follows_twist(t in -3i64..=3, m in 1usize..=2) {
        prop_assume!(t != 0);
        let h = common::landau_cohomology(m, t, 3);
        let d = t.unsigned_abs().pow(m as u32);
        for (q, &dim) in h.iter().enumerate() {
            let expect = if (t > 0 && q == m) || (t < 0 && q == 0) { d } else { 0 };
            prop_assert_eq!(dim, expect);
        }
    }
}
