use num_traits::Zero;
use proptest::prelude::*;

use super::{format, rat, DiffPoly, JetMonomial};

fn arb_monomial() -> impl Strategy<Value = JetMonomial> {
    proptest::collection::vec(0u32..=2, 4).prop_filter_map("degree <= 4", |exps| {
        let m = JetMonomial::from_dense(exps);
        (m.degree() <= 4).then_some(m)
    })
}

fn arb_poly() -> impl Strategy<Value = DiffPoly> {
    proptest::collection::vec((arb_monomial(), -6i64..=6, 1i64..=4), 0..5).prop_map(|terms| {
        DiffPoly::from_terms(terms.into_iter().map(|(m, n, d)| (m, rat(n, d))))
    })
}

fn without_constant(p: DiffPoly) -> DiffPoly {
    let c = p.constant_term();
    p - DiffPoly::constant(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivatives_are_variationally_trivial(p in arb_poly()) {
        prop_assert!(p.total_derivative().euler_operator().is_zero());
    }

    #[test]
    fn antiderivative_inverts_total_derivative(p in arb_poly()) {
        let p = without_constant(p);
        prop_assert_eq!(p.total_derivative().antiderivative().unwrap(), p);
    }

    #[test]
    fn total_derivative_inverts_antiderivative(p in arb_poly()) {
        if let Ok(q) = p.antiderivative() {
            prop_assert_eq!(q.total_derivative(), p);
            prop_assert!(q.constant_term().is_zero());
        }
    }

    #[test]
    fn frechet_is_linear(p in arb_poly(), a in arb_poly(), b in arb_poly()) {
        let c = rat(-3, 2);
        let lhs = p.frechet(&(&a + &b.scale(&c)));
        let rhs = p.frechet(&a) + p.frechet(&b).scale(&c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_is_bilinear_and_antisymmetric(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
        prop_assert_eq!(p.lie_bracket(&q), -q.lie_bracket(&p));
        prop_assert_eq!(p.lie_bracket(&(&q + &r)), p.lie_bracket(&q) + p.lie_bracket(&r));
    }

    #[test]
    fn leibniz_rule(p in arb_poly(), q in arb_poly()) {
        let lhs = (&p * &q).total_derivative();
        let rhs = &p.total_derivative() * &q + &p * &q.total_derivative();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn text_and_json_round_trip(p in arb_poly()) {
        prop_assert_eq!(format::parse(&p.to_string()).unwrap(), p.clone());
        prop_assert_eq!(format::from_json(&format::to_json(&p)).unwrap(), p);
    }

    #[test]
    fn evaluation_is_a_ring_map(p in arb_poly(), q in arb_poly()) {
        let jets: Vec<Vec<f64>> = (0..4)
            .map(|j| (0..5).map(|i| 0.3 + 0.1 * (i as f64) - 0.05 * j as f64).collect())
            .collect();
        let prod = (&p * &q).evaluate(&jets);
        let (ep, eq) = (p.evaluate(&jets), q.evaluate(&jets));
        for i in 0..5 {
            prop_assert!((prod[i] - ep[i] * eq[i]).abs() <= 1e-9 * (1.0 + prod[i].abs()));
        }
        prop_assert!(DiffPoly::zero().evaluate(&jets).iter().all(|v| v.is_zero()));
    }
}
