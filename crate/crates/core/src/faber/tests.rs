use super::*;
use crate::jetalg::rat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = BigRational;

fn random_rationals(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n)
        .map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=9)))
        .collect()
}

fn oracle_chart() -> Coefficients<Q> {
    Coefficients::exact(vec![rat(1, 2), rat(-1, 3), rat(2, 5), rat(1, 7)])
}

fn poly(text_terms: &[(u32, Q)]) -> MPoly {
    text_terms.iter().fold(MPoly::zero(), |acc, (d, c)| {
        let mut t = MPoly::constant(c.clone());
        for _ in 0..*d {
            t = t.mul(&MPoly::w());
        }
        acc.add(&t)
    })
}

#[test]
fn faber_of_the_bare_pole_is_monomial() {
    let a = Coefficients::exact(Vec::<Q>::new());
    let p = faber_polynomials(&a, 12).unwrap();
    assert_eq!(p[0], MPoly::one());
    for (n, pn) in p.iter().enumerate() {
        assert_eq!(*pn, poly(&[(n as u32, rat(1, 1))]));
    }
}

#[test]
fn faber_oracle_values() {
    let p = faber_polynomials(&oracle_chart(), 4).unwrap();
    assert_eq!(p[1], poly(&[(1, rat(1, 1))]));
    assert_eq!(p[2], poly(&[(2, rat(1, 1)), (0, rat(-1, 1))]));
    assert_eq!(p[3], poly(&[(3, rat(1, 1)), (1, rat(-3, 2)), (0, rat(1, 1))]));
    assert_eq!(
        p[4],
        poly(&[(4, rat(1, 1)), (2, rat(-2, 1)), (1, rat(4, 3)), (0, rat(-11, 10))])
    );
    assert_eq!(p[2].to_string(), "w^2 - 1");
}

#[test]
fn faber_symbolic_low_orders() {
    let p = faber_symbolic(3);
    assert_eq!(p[2].to_string(), "w^2 - 2*a1");
    assert_eq!(p[3].to_string(), "w^3 - 3*w*a1 - 3*a2");
    assert_eq!(p[3].to_latex(), "w^{3} - 3 w a_{1} - 3 a_{2}");
}

#[test]
fn generating_function_matches_recurrence() {
    let sym = Coefficients::exact((1..8).map(MPoly::a).collect());
    assert_eq!(
        faber_polynomials_in(&sym, 8).unwrap(),
        faber_by_recurrence(&sym, 8).unwrap()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let a = random_rationals(&mut rng, 11);
        let lifted = Coefficients::truncated(a.iter().cloned().map(MPoly::constant).collect());
        assert_eq!(
            faber_polynomials_in(&lifted, 12).unwrap(),
            faber_by_recurrence(&lifted, 12).unwrap()
        );
    }
}

#[test]
fn missing_coefficients_fail_loudly() {
    let a = Coefficients::truncated(vec![rat(1, 2)]);
    assert!(matches!(faber_polynomials(&a, 3), Err(Error::InsufficientOrder(_))));
    assert!(faber_polynomials(&a, 2).is_ok());
    assert!(matches!(grunsky(&a, 2), Err(Error::InsufficientOrder(_))));
    assert!(matches!(schwarzian_grunsky_check(&a, 4), Err(Error::InsufficientOrder(_))));
    assert!(matches!(bridge_check(&a, 3), Err(Error::InsufficientOrder(_))));
}

#[test]
fn grunsky_closed_forms() {
    let zero = grunsky(&Coefficients::exact(Vec::<Q>::new()), 5).unwrap();
    assert!(zero.entries.iter().flatten().all(|c| c.is_zero()));

    let a1 = rat(1, 3);
    let h = grunsky(&Coefficients::exact(vec![a1.clone()]), 6).unwrap();
    for m in 1..=6 {
        for n in 1..=6 {
            let expect = if m == n {
                -num_traits::pow(a1.clone(), m) / rat(m as i64, 1)
            } else {
                rat(0, 1)
            };
            assert_eq!(*h.get(m, n), expect);
        }
    }
    assert_eq!(*h.get(1, 1), rat(-1, 3));
}

#[test]
fn grunsky_oracle_values() {
    let h = grunsky(&oracle_chart(), 3).unwrap();
    let expect = [
        [rat(-1, 2), rat(1, 3), rat(-2, 5)],
        [rat(1, 3), rat(-21, 40), rat(1, 42)],
        [rat(-2, 5), rat(1, 42), rat(-127, 360)],
    ];
    for m in 0..3 {
        for n in 0..3 {
            assert_eq!(h.entries[m][n], expect[m][n], "h[{}][{}]", m + 1, n + 1);
        }
    }
    assert!(h.to_latex().starts_with("\\begin{pmatrix}\n-\\frac{1}{2} & \\frac{1}{3}"));
}

#[test]
fn grunsky_is_symmetric_for_random_charts() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let a = Coefficients::truncated(random_rationals(&mut rng, 15));
        assert!(grunsky(&a, 8).unwrap().is_symmetric());
    }
}

#[test]
fn schwarzian_examples() {
    let pole = Series::polynomial(-1, vec![rat(1, 1)], 10);
    assert!(schwarzian_series(&pole, 6).unwrap().is_zero_through(6));

    let a1 = rat(2, 3);
    let f = Coefficients::exact(vec![a1.clone()]).laurent_chart(9).unwrap();
    let s = schwarzian_series(&f, 4).unwrap();
    let expect = [
        rat(-6, 1) * &a1,
        rat(0, 1),
        rat(-12, 1) * &a1 * &a1,
        rat(0, 1),
        rat(-18, 1) * &a1 * &a1 * &a1,
    ];
    for (n, e) in expect.iter().enumerate() {
        assert_eq!(s.coeff(n as i64).unwrap(), *e);
    }

    let s = schwarzian_series(&oracle_chart().laurent_chart(5).unwrap(), 2).unwrap();
    assert_eq!(s, Series::new(0, vec![rat(-3, 1), rat(8, 1), rat(-27, 1)]));
}

#[test]
fn schwarzian_rescales_under_dilation() {
    let c = rat(3, 2);
    let a = oracle_chart();
    let f = a.laurent_chart(8).unwrap();
    let scaled = f.compose(&Series::polynomial(1, vec![c.clone()], 10)).unwrap();
    let lhs = schwarzian_series(&scaled, 6).unwrap();
    let s = schwarzian_series(&f, 6).unwrap();
    for n in 0..=6 {
        let expect = s.coeff(n).unwrap() * num_traits::pow(c.clone(), n as usize + 2);
        assert_eq!(lhs.coeff(n).unwrap(), expect);
    }
}

#[test]
fn schwarzian_grunsky_identity() {
    assert!(schwarzian_grunsky_check(&Coefficients::exact(Vec::<Q>::new()), 8)
        .unwrap()
        .is_zero_through(6));
    let r = schwarzian_grunsky_check(&Coefficients::exact(vec![rat(-5, 7)]), 8).unwrap();
    assert!(r.is_zero_through(6));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let a = Coefficients::truncated(random_rationals(&mut rng, 9));
        assert!(schwarzian_grunsky_check(&a, 10).unwrap().is_zero_through(8));
    }
}

#[test]
fn lagrange_inversion_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = Coefficients::truncated(random_rationals(&mut rng, 7));
    let z = a.loop_chart(7).unwrap();
    let g = inverse_chart(&z).unwrap();
    assert_eq!(g.compose(&z).unwrap(), Series::variable(9));
}

#[test]
fn bridge_examples() {
    let id = Coefficients::exact(Vec::<Q>::new());
    assert!(bridge_check(&id, 5).unwrap().is_zero_through(5));
    let quad = Coefficients::exact(vec![rat(1, 3)]);
    assert!(bridge_check(&quad, 4).unwrap().is_zero_through(4));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = Coefficients::truncated(random_rationals(&mut rng, 6));
    assert!(bridge_check(&a, 6).unwrap().is_zero_through(6));
}

#[test]
fn expansion_matches_displayed_terms() {
    let id = expansion_coefficients(&Coefficients::exact(Vec::<Q>::new()), 4).unwrap();
    assert!(id.is_zero_through(4));

    let a = oracle_chart();
    let e = expansion_coefficients(&a, 4).unwrap();
    let (a1, a2) = (rat(1, 2), rat(-1, 3));
    // Z″(0)/Z′(0) = 2a₁, Z‴(0)/Z′(0) = 6a₂.
    let (r2, r3) = (rat(2, 1) * &a1, rat(6, 1) * &a2);
    let first = rat(1, 4) * &r2;
    assert_eq!(e.coeff(1, 0).unwrap(), first);
    assert_eq!(e.coeff(0, 1).unwrap(), first);
    let third = rat(1, 12) * (&r3 - rat(3, 4) * &r2 * &r2);
    assert_eq!(e.coeff(2, 0).unwrap(), third);
    assert_eq!(e.coeff(0, 2).unwrap(), third);
    let z = a.loop_chart(4).unwrap();
    let schwarzian_at_0 = schwarzian_series(&z, 0).unwrap().coeff(0).unwrap();
    assert_eq!(e.coeff(1, 1).unwrap(), rat(1, 12) * schwarzian_at_0);
}

#[test]
fn circle_chart_identities() {
    let e = expansion_coefficients(&circle_chart(4), 4).unwrap();
    let c = |re: Q, im: Q| Complex::new(re, im);
    // k ≡ 1, ∂_s k = 0.
    assert_eq!(e.coeff(1, 0).unwrap(), c(rat(0, 1), rat(1, 4)));
    assert_eq!(e.coeff(2, 0).unwrap(), c(rat(-1, 48), rat(0, 1)));
    assert_eq!(e.coeff(1, 1).unwrap(), c(rat(1, 24), rat(0, 1)));
    assert!(bridge_check(&circle_chart(6), 6).unwrap().is_zero_through(6));
}

#[test]
fn json_and_parsing() {
    let a = Coefficients::parse(&["1/2".into(), "-3".into()], true).unwrap();
    assert_eq!(a.values(), &[rat(1, 2), rat(-3, 1)]);
    assert!(matches!(
        Coefficients::parse(&["1/x".into()], true),
        Err(Error::Parse(_))
    ));
    let h = grunsky(&a, 1).unwrap();
    assert_eq!(h.to_json().to_string(), r#"{"h":[["-1/2"]],"order":1}"#);
}

#[test]
fn numeric_loop_satisfies_the_bridge() {
    use crate::loopgeom::{immersion_of, CurvatureField, Tolerances};
    use crate::spectral::Grid;

    let g = Grid::<f64>::new(128).unwrap();
    let k = CurvatureField::from_fn(&g, |s: f64| 1.0 + 0.5 * (2.0 * s + 0.3).cos()).unwrap();
    let (z, _) = immersion_of(&k, 0.0, Complex::new(0.0, 0.0), &Tolerances::default()).unwrap();
    let a = Coefficients::truncated(z.taylor_coefficients(6));
    let r = bridge_check(&a, 6).unwrap();
    assert!(r.max_magnitude_through(6) < 1e-8, "{:e}", r.max_magnitude_through(6));

    let (k0, ks) = (k.values()[0], k.derivative(1)[0]);
    let i = Complex::new(0.0, 1.0);
    let e = expansion_coefficients(&a, 2).unwrap();
    let close = |x: Complex<f64>, y: Complex<f64>| (x - y).norm() < 1e-10;
    assert!(close(e.coeff(1, 0).unwrap(), i * k0 / 4.0));
    assert!(close(e.coeff(2, 0).unwrap(), -(k0 * k0 / 4.0 - i * ks) / 12.0));
    assert!(close(e.coeff(1, 1).unwrap(), (k0 * k0 / 4.0 + i * ks / 2.0) / 6.0));
}
