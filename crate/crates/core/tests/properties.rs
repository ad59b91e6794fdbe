use proptest::prelude::*;

use hulthen_core::darboux;
use hulthen_core::exppoly::Term;
use hulthen_core::hulthen::{self, ReducedParams};
use hulthen_core::identities;
use hulthen_core::oracle;
use hulthen_core::specfun::pochhammer;
use hulthen_core::{ExpPoly, Rational, Scalar};

fn rat(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..9).prop_map(|(n, d)| rat(n, d))
}

/// Non-integer rationals, kept away from the poles of the series.
fn generic_rational() -> impl Strategy<Value = Rational> {
    (1i64..60, prop_oneof![Just(3i64), Just(7), Just(11)]).prop_map(|(n, d)| rat(n, d) + rat(1, 13))
}

fn float_exppoly(q: f64) -> impl Strategy<Value = ExpPoly<f64>> {
    prop::collection::vec((-4.0f64..-0.5, prop::collection::vec(-3.0f64..3.0, 1..5)), 1..3).prop_map(move |terms| {
        ExpPoly::new(q, terms.into_iter().map(|(alpha, coeffs)| Term { alpha, coeffs }).collect())
    })
}

fn rational_exppoly() -> impl Strategy<Value = ExpPoly<Rational>> {
    (
        prop::collection::vec(small_rational(), 1..5),
        -6i64..0,
        1i64..4,
    )
        .prop_map(|(coeffs, a, q)| ExpPoly::single(rat(q, 1), rat(a, 2), coeffs))
}

/// `(v, q)` with at least `min_states` bound states.
fn reduced_params(min_states: usize) -> impl Strategy<Value = ReducedParams<Rational>> {
    (1i64..5, 1i64..4, 1i64..60).prop_map(move |(qn, qd, extra)| {
        let q = rat(qn, qd);
        let floor = ((min_states + 1) * (min_states + 1)) as i64;
        let v = q.clone() * (rat(floor, 1) + rat(extra, 7));
        ReducedParams::new(v, q).unwrap()
    })
}

proptest! {
    #[test]
    fn evaluation_is_a_ring_homomorphism(f in float_exppoly(1.5), g in float_exppoly(1.5), r in 0.5f64..8.0) {
        let (fr, gr) = (f.evaluate(r).unwrap(), g.evaluate(r).unwrap());
        let scale = 1.0 + fr.abs() + gr.abs();
        prop_assert!((f.add(&g).unwrap().evaluate(r).unwrap() - (fr + gr)).abs() <= 1e-12 * scale);
        prop_assert!((f.mul(&g).unwrap().evaluate(r).unwrap() - fr * gr).abs() <= 1e-12 * scale * scale);
    }

    #[test]
    fn derivative_matches_central_difference(f in float_exppoly(1.0), r in 1.0f64..6.0) {
        let h = 1e-5;
        let fd = (f.evaluate(r + h).unwrap() - f.evaluate(r - h).unwrap()) / (2.0 * h);
        let exact = f.differentiate().evaluate(r).unwrap();
        let scale: f64 = f.terms().iter().map(|t| t.coeffs.iter().map(|c| c.abs()).sum::<f64>()).sum();
        prop_assert!((fd - exact).abs() <= 1e-7 * (1.0 + scale));
    }

    #[test]
    fn exact_division_inverts_multiplication(f in rational_exppoly(), g in rational_exppoly()) {
        prop_assume!(f.q() == g.q() && !g.is_zero() && !f.is_zero());
        let prod = f.mul(&g).unwrap();
        let back = ExpPoly::divide_exact(&prod, &g).unwrap();
        prop_assert!(back.sub(&f).unwrap().collapse_integer_shifts().is_zero());
    }

    #[test]
    fn wronski_derivative_identity(f in rational_exppoly(), g in rational_exppoly()) {
        prop_assume!(f.q() == g.q());
        let w = ExpPoly::wronskian(&[f.clone(), g.clone()]).unwrap();
        let rhs = f.mul(&g.derivative(2)).unwrap().sub(&f.derivative(2).mul(&g).unwrap()).unwrap();
        prop_assert!(w.differentiate().sub(&rhs).unwrap().collapse_integer_shifts().is_zero());
    }

    #[test]
    fn pochhammer_splits(a in small_rational(), m in 0usize..6, n in 0usize..6) {
        let whole = pochhammer(&a, m + n);
        let parts = pochhammer(&a, m) * pochhammer(&(a.clone() + Rational::from_i64(m as i64)), n);
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn euler_terminating_exact(n in 0usize..8, k in 0usize..8, c in generic_rational(), z in small_rational()) {
        prop_assume!(k <= n);
        let s = identities::euler_terminating(n, k, &c, &(z / Rational::from_i64(41))).unwrap();
        prop_assert_eq!(s.lhs, s.rhs);
    }

    #[test]
    fn euler_terminating_float(n in 0usize..8, k in 0usize..8, c in 0.3f64..9.0, z in -0.9f64..0.95) {
        prop_assume!(k <= n);
        let s = identities::euler_terminating(n, k, &c, &z).unwrap();
        prop_assert!(s.defect() <= 1e-11, "{s:?}");
    }

    #[test]
    fn euler_series_transformation(a in -2.5f64..2.5, b in -2.5f64..2.5, c in 0.6f64..5.0, z in -0.6f64..0.6) {
        let s = identities::euler_series(a, b, c, z).unwrap();
        prop_assert!(s.defect() <= 1e-10, "{s:?}");
    }

    #[test]
    fn contiguous_relation(n in 1usize..9, b in generic_rational(), c in generic_rational(), z in small_rational()) {
        let z = z / Rational::from_i64(41);
        let exact = identities::contiguous(n, &b, &c, &z).unwrap();
        prop_assert_eq!(exact.lhs, Rational::from_i64(0));
        let float = identities::contiguous(n, &b.to_f64(), &c.to_f64(), &z.to_f64()).unwrap();
        prop_assert!(float.lhs.abs() <= 1e-11 * float.rhs, "{float:?}");
    }

    #[test]
    fn thomae_relation(a in 0.2f64..4.0, b in 0.2f64..4.0, n in 0usize..7, d in 0.5f64..6.0, e in 0.5f64..6.0) {
        // gamma arguments stay positive
        prop_assume!(d + e - a - b > 0.3);
        let s = identities::thomae(a, b, n, d, e).unwrap();
        prop_assert!(s.defect() <= 1e-10, "{s:?}");
    }

    #[test]
    fn vanishing_sum(m in 1usize..9, l in 0usize..4, s in 0usize..4, a in generic_rational(), b in generic_rational()) {
        prop_assume!(l + s < m);
        let exact = identities::vanishing(m, &a, &b, l, s).unwrap();
        prop_assert_eq!(exact.lhs, Rational::from_i64(0));
        let float = identities::vanishing(m, &a.to_f64(), &b.to_f64(), l, s).unwrap();
        prop_assert!(float.lhs.abs() <= 1e-11 * float.rhs, "{float:?}");
    }

    #[test]
    fn residual_is_homogeneous(p in reduced_params(1), c in 0.01f64..100.0, shift in 0.05f64..2.0) {
        let p = p.to_float();
        let psi = hulthen::eigenfunction(&p, 0).unwrap();
        let wrong = hulthen::energy(&p, 0).unwrap() + shift;
        let base = oracle::ode_residual(&psi, &p.v, &p.q, &0.0, &wrong).unwrap();
        let scaled = oracle::ode_residual(&psi.scale(&-c), &p.v, &p.q, &0.0, &wrong).unwrap();
        prop_assert!((scaled - c * base).abs() <= 1e-12 * c * base);
    }

    #[test]
    fn energies_follow_the_existence_rule(p in reduced_params(1)) {
        let count = hulthen::bound_state_count(&p);
        let ratio = p.v.clone() / p.q.clone();
        prop_assert!(Rational::from_i64((count * count) as i64) < ratio);
        prop_assert!(Rational::from_i64(((count + 1) * (count + 1)) as i64) >= ratio);
        let energies: Vec<_> = (0..count).map(|n| hulthen::energy(&p, n).unwrap()).collect();
        prop_assert!(energies.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(energies.iter().all(|e| *e < Rational::from_i64(0)));
        prop_assert!(hulthen::energy(&p, count).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chain_states_solve_the_partner_equation(p in reduced_params(3)) {
        let count = hulthen::bound_state_count(&p);
        for j in 1..=2 {
            let barrier = darboux::chain_potential(&p, j).barrier_coefficient;
            for n in j..count.min(j + 2) {
                let e = hulthen::energy(&p, n).unwrap();
                let w = darboux::crum_chain(&p, j, n).unwrap().psi;
                prop_assert_eq!(oracle::ode_residual(&w, &p.v, &p.q, &barrier, &e).unwrap(), 0.0);
                let c = darboux::closed_form_chain_state(&p, j, n).unwrap();
                prop_assert_eq!(&w, &c.psi.scale(c.proportionality.as_ref().unwrap()));
                prop_assert_eq!(darboux::iterated_chain(&p, j, n).unwrap(), w);
            }
        }
    }

    #[test]
    fn base_states_are_orthogonal(p in reduced_params(2)) {
        let p = p.to_float();
        let count = hulthen::bound_state_count(&p);
        // shallow states need a very long window; keep decay rates above 0.05
        let kept = (0..count.min(4)).filter(|&n| hulthen::energy(&p, n).unwrap() < -0.0025).count();
        prop_assume!(kept >= 2);
        let states: Vec<_> = (0..kept).map(|n| hulthen::eigenfunction(&p, n).unwrap()).collect();
        let slowest = (-hulthen::energy(&p, kept - 1).unwrap()).sqrt();
        let g = oracle::gram_matrix_rel(&states, 1e-12, 60, oracle::default_r_max(p.q, slowest)).unwrap();
        for a in 0..states.len() {
            let closed = hulthen::norm_integral(&p, a, a).unwrap();
            prop_assert!((g[a][a] / closed - 1.0).abs() <= 1e-8);
            for b in a + 1..states.len() {
                prop_assert!(g[a][b].abs() <= 1e-8 * (g[a][a] * g[b][b]).sqrt());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn crum_wronski_identity(p in reduced_params(3), j in 1usize..3) {
        let count = hulthen::bound_state_count(&p);
        let fs: Vec<_> = (0..count).map(|n| hulthen::eigenfunction(&p, n).unwrap()).collect();
        let g = &fs[count - 1];
        prop_assume!(j + 1 < count);
        let w = |v: &[ExpPoly<Rational>]| ExpPoly::wronskian(v).unwrap();
        let lower = w(&fs[..j]);
        let upper = w(&fs[..=j]);
        let mut with_g = fs[..=j].to_vec();
        with_g.push(g.clone());
        let mut lower_g = fs[..j].to_vec();
        lower_g.push(g.clone());
        let lhs = lower.mul(&w(&with_g)).unwrap();
        let rhs = w(&[upper, w(&lower_g)]);
        prop_assert!(lhs.sub(&rhs).unwrap().collapse_integer_shifts().is_zero());
    }
}
