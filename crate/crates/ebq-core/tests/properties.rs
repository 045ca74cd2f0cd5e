//! Randomized invariants of the special functions, mode algebra, R-matrix and face weights.

use ebq_core::face_checks::check_unitarity;
use ebq_core::mode_algebra::{commutator, gram, eps_vector, EpsLabel};
use ebq_core::rmatrix::{assemble, coef_bbar, indices, permutation, DynamicalParam, PrefactorMode, RMatrixValue};
use ebq_core::sampling::generic;
use ebq_core::special_functions::{bracket, theta_p, theta_sum};
use ebq_core::vector_rep::ShiftedMatrix;
use ebq_core::{c, AlgebraParams, TruncationPolicy, C};
use nalgebra::DMatrix;
use proptest::prelude::*;
use std::sync::Arc;

fn params(n: usize) -> AlgebraParams {
    AlgebraParams::new(n, c(0.45, 0.05), c(4.3, 0.0), c(1.2, 0.0)).unwrap()
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn cplx(re: std::ops::Range<f64>, im: std::ops::Range<f64>) -> impl Strategy<Value = C> {
    (re, im).prop_map(|(a, b)| c(a, b))
}

fn heights(n: usize) -> impl Strategy<Value = Vec<C>> {
    prop::collection::vec(cplx(0.1..2.4, 0.03..0.12), n).prop_filter("generic heights", |s| generic(s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_product_matches_series(z in cplx(0.3..1.5, -0.4..0.4), pr in 0.1f64..0.5, pi in -0.1f64..0.1) {
        let pol = TruncationPolicy::default();
        let p = c(pr, pi);
        prop_assert!(rel(theta_p(z, p, &pol).unwrap(), theta_sum(z, p, &pol).unwrap()) < 1e-12);
    }

    #[test]
    fn theta_inversion_symmetry(z in cplx(0.3..1.5, -0.4..0.4), pr in 0.1f64..0.5) {
        let pol = TruncationPolicy::default();
        let p = c(pr, 0.02);
        let lhs = theta_p(p / z, p, &pol).unwrap();
        let rhs = theta_p(z, p, &pol).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn bracket_is_odd(u in cplx(-1.5..1.5, -0.2..0.2), starred in any::<bool>()) {
        let pr = params(2);
        let (a, b) = (bracket(u, &pr, starred), bracket(-u, &pr, starred));
        prop_assert!((a + b).norm() <= 1e-12 * a.norm().max(1e-12));
    }

    #[test]
    fn bracket_quasi_periodic(u in cplx(-1.5..1.5, -0.2..0.2), starred in any::<bool>()) {
        let pr = params(2);
        let (r, _) = pr.elliptic(starred);
        let lhs = bracket(u + r, &pr, starred);
        let rhs = -bracket(u, &pr, starred);
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn gram_is_symmetric(n in 1usize..=3, m in prop::sample::select(vec![-6, -3, -1, 1, 2, 5])) {
        let g = gram(m, &params(n)).unwrap();
        prop_assert!((&g - g.transpose()).norm() <= 1e-14 * g.norm());
    }

    #[test]
    fn commutator_is_antisymmetric(n in 1usize..=3, m in 1i32..=6, j in 1usize..=3, k in 1usize..=3, sj in any::<bool>(), sk in any::<bool>()) {
        prop_assume!(j <= n && k <= n);
        let pr = params(n);
        let lab = |s: bool, i: usize| if s { EpsLabel::Plus(i) } else { EpsLabel::Minus(i) };
        let x = eps_vector(lab(sj, j), m, &pr).unwrap();
        let y = eps_vector(lab(sk, k), -m, &pr).unwrap();
        let a = commutator(&x, &y, &pr).unwrap();
        let b = commutator(&y, &x, &pr).unwrap();
        prop_assert!((a + b).norm() <= 1e-12 * a.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn weight_conservation_is_structural(n in 1usize..=2, u in cplx(0.1..0.9, 0.02..0.09), s in prop::collection::vec(cplx(0.1..2.4, 0.03..0.12), 2)) {
        let s: Vec<C> = s.into_iter().take(n).collect();
        prop_assume!(generic(&s));
        let pr = params(n);
        let rv = assemble(u, &DynamicalParam::new(s, &pr).unwrap(), PrefactorMode::None, &pr).unwrap();
        let idx = indices(n);
        for &a in &idx { for &b in &idx { for &cc in &idx { for &d in &idx {
            if !RMatrixValue::allowed(a, b, cc, d, n) {
                prop_assert_eq!(rv.get(a, b, cc, d), c(0.0, 0.0));
            }
        }}}}
    }

    #[test]
    fn rbar_at_zero_is_permutation(n in 1usize..=3, s in heights(3)) {
        let s: Vec<C> = s.into_iter().take(n).collect();
        let pr = params(n);
        let rv = assemble(c(0.0, 0.0), &DynamicalParam::new(s, &pr).unwrap(), PrefactorMode::None, &pr).unwrap();
        prop_assert!((&rv.m - permutation(n)).norm() < 1e-12);
    }

    #[test]
    fn bbar_is_s_independent(u in cplx(0.1..0.9, 0.02..0.09), s in heights(2)) {
        let pr = params(2);
        let rv = assemble(u, &DynamicalParam::new(s, &pr).unwrap(), PrefactorMode::None, &pr).unwrap();
        let want = coef_bbar(u, &pr);
        for (j1, j2) in [(1, 2), (1, -2), (2, -1), (0, -1)] {
            prop_assert!((rv.get(j2, j2, j1, j1) - want).norm() < 1e-14 * want.norm().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn face_unitarity(n in 1usize..=2, u in cplx(0.1..0.9, 0.02..0.09), a in heights(2)) {
        let a: Vec<C> = a.into_iter().take(n).collect();
        for r in check_unitarity(u, &a, &params(n)) {
            prop_assert!(r.pass, "{} residual {:e}", r.check_id, r.max_rel_residual);
        }
    }
}

/// Entry `(i, j)` of a random shifted matrix: `a_ij (1 + Σ_k w_ijk P_k)` with shift `g_i − g_j + t`.
/// Such shift patterns compose consistently, which is what the product requires.
fn random_shifted(seed: &[f64], g: &[Vec<i32>], t: &[i32]) -> ShiftedMatrix {
    let dim = g.len();
    let rank = t.len();
    let coef: Vec<f64> = seed.to_vec();
    let f = Arc::new(move |p: &[C]| {
        DMatrix::from_fn(dim, dim, |i, j| {
            let base = (i * dim + j) * (rank + 1);
            let lin: C = (0..rank).map(|k| coef[base + 1 + k] * p[k]).sum();
            coef[base] * (C::from(1.0) + lin)
        })
    });
    let shift = (0..dim)
        .map(|i| (0..dim).map(|j| Some((0..rank).map(|k| g[i][k] - g[j][k] + t[k]).collect())).collect())
        .collect();
    ShiftedMatrix { dim, f, shift }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shifted_product_is_associative(
        coefs in prop::collection::vec(-1.0f64..1.0, 3 * 9 * 3),
        g in prop::collection::vec(prop::collection::vec(-2i32..=2, 2), 3),
        t in prop::collection::vec(prop::collection::vec(-1i32..=1, 2), 3),
        p in prop::collection::vec(cplx(-1.0..1.0, -0.2..0.2), 2),
    ) {
        let m: Vec<ShiftedMatrix> = (0..3).map(|i| random_shifted(&coefs[i * 27..(i + 1) * 27], &g, &t[i])).collect();
        let left = m[0].mul(&m[1]).unwrap().mul(&m[2]).unwrap().eval(&p);
        let right = m[0].mul(&m[1].mul(&m[2]).unwrap()).unwrap().eval(&p);
        prop_assert!((&left - &right).norm() <= 1e-13 * left.norm().max(1.0));
    }
}
