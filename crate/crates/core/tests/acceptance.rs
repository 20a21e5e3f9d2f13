//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use elastica_mkdv::deform::omega2_numeric;
use elastica_mkdv::faber::{
    bridge_check, faber_by_recurrence, faber_polynomials, faber_polynomials_in, grunsky,
    schwarzian_grunsky_check, Coefficients, MPoly, Ring,
};
use elastica_mkdv::flow::{
    elastica_residuals, elastica_solve, evolve_immersion, integrate, ElasticaOptions, ElasticaParams,
    IntegrateOptions, Scheme,
};
use elastica_mkdv::hierarchy::{flow, kdv_bridge_check, zero_mean_gauge};
use elastica_mkdv::jetalg::{format::parse, rat};
use elastica_mkdv::loopgeom::{immersion_of, tjurin_identity_residuals};
use elastica_mkdv::{Curvature, DiffPoly, Grid, Tolerances};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, name: &str, pass: bool, started: Instant, detail: String) {
    println!(
        "criterion {n:>2} [{name}]: {} ({detail}; {:.2?})",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed()
    );
    assert!(pass, "criterion {n} failed: {detail}");
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn standard(n: usize) -> Curvature {
    let g = Grid::new(n).unwrap();
    Curvature::from_fn(&g, |s| 1.0 + 0.5 * (2.0 * s).cos()).unwrap()
}

fn random_rationals(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigRational> {
    (0..n)
        .map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=9)))
        .collect()
}

#[test]
fn criterion_01_symbolic_mkdv() {
    let t0 = Instant::now();
    let k2 = flow(2).unwrap().rhs;
    let exact = k2 == parse("u3 + 3/2*u0^2*u1").unwrap();

    // k = 2i·v and t → −t: a degree-d term picks up −(2i)^{d−1}.
    let rescaled = DiffPoly::from_terms(k2.terms().map(|(m, c)| {
        let d = m.degree();
        let factor = BigRational::from_integer(BigInt::from(-4).pow((d - 1) / 2));
        (m.clone(), -(c * factor))
    }));
    let matches_normalization = rescaled == parse("-u3 + 6*u0^2*u1").unwrap();
    report(
        1,
        "symbolic mKdV",
        exact && matches_normalization,
        t0,
        format!("K_2 = {k2}; rescaled to v_t = {rescaled}"),
    );
}

#[test]
fn criterion_02_commutativity() {
    let t0 = Instant::now();
    let pairs = [(1, 2), (1, 3), (2, 3)];
    let zero = pairs.iter().all(|&(i, j)| {
        flow(i)
            .unwrap()
            .rhs
            .lie_bracket(&flow(j).unwrap().rhs)
            .is_zero()
    });
    report(2, "commutativity", zero, t0, format!("[K_i, K_j] = 0 for {pairs:?}"));
}

#[test]
fn criterion_03_formal_isoenergy_isometry() {
    let t0 = Instant::now();
    let mut ok = true;
    for n in 1..=5 {
        let kn = flow(n).unwrap().rhs;
        ok &= kn.euler_operator().is_zero();
        ok &= (&DiffPoly::u(0) * &kn).euler_operator().is_zero();
    }
    report(3, "formal isoenergy/isometry", ok, t0, "E(K_n) = E(u0 K_n) = 0 for n <= 5".into());
}

#[test]
fn criterion_04_miura_bridge() {
    let t0 = Instant::now();
    let b = kdv_bridge_check().unwrap();
    let ok = b.residual.is_zero() && b.alpha == rat(6, 1) && b.beta == rat(1, 1);
    report(
        4,
        "Miura bridge",
        ok,
        t0,
        format!("u_t = {} u u_s + {} u_sss, residual {}", b.alpha, b.beta, b.residual),
    );
}

#[test]
fn criterion_05_numeric_conservation() {
    let t0 = Instant::now();
    let k = standard(256);
    let two = integrate(&k, 2, 0.5, 1e-4, &IntegrateOptions::default()).unwrap();
    let three = integrate(
        &k,
        3,
        0.05,
        1e-5,
        &IntegrateOptions {
            scheme: Scheme::GaussLegendre4,
            ..Default::default()
        },
    )
    .unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for (n, t) in [(2, &two), (3, &three)] {
        let (e, m, c) = (t.energy_drift(), t.mean_drift(), t.max_closure_defect());
        ok &= e <= 1e-6 && m <= 1e-10 && c <= 1e-6 * TAU;
        detail.push(format!("n={n}: dE/E={e:.2e} dmean={m:.2e} closure={c:.2e}"));
    }
    report(5, "numeric conservation", ok, t0, detail.join(", "));
}

#[test]
fn criterion_06_symbolic_numeric_cross_validation() {
    let t0 = Instant::now();
    let k = standard(256);
    let tol = Tolerances::default();
    let jets = k.jets(7);
    let mut iterated = k.derivative(1);
    let mut worst: f64 = 0.0;
    for n in 1..=4usize {
        if n > 1 {
            iterated = omega2_numeric(&k, &iterated, &tol).unwrap();
        }
        let flows: Vec<_> = (1..=n).map(|j| flow(j).unwrap()).collect();
        let means: Vec<f64> = flows[1..]
            .iter()
            .map(|f| k.grid().mean(&f.certificate.as_ref().unwrap().evaluate(&jets)))
            .collect();
        let beta = zero_mean_gauge(n, &means);
        let mut symbolic = vec![0.0; k.grid().len()];
        for (b, f) in beta.iter().zip(&flows) {
            for (s, v) in symbolic.iter_mut().zip(f.rhs.evaluate(&jets)) {
                *s += b * v;
            }
        }
        worst = worst.max(sup_diff(&iterated, &symbolic));
    }
    report(
        6,
        "symbolic/numeric cross-validation",
        worst <= 1e-8,
        t0,
        format!("max gap over n <= 4: {worst:.2e}"),
    );
}

#[test]
fn criterion_07_immersion_consistency() {
    let t0 = Instant::now();
    let k = standard(256);
    let tol = Tolerances::default();
    let (z, _) = immersion_of(&k, 0.0, Complex::new(0.0, 0.0), &tol).unwrap();
    let run = evolve_immersion(&z, 2, 0.1, 1e-4, &IntegrateOptions::default()).unwrap();
    let ok = run.consistency <= 1e-4 && run.max_unit_drift <= 1e-6;
    report(
        7,
        "immersion/curvature consistency",
        ok,
        t0,
        format!(
            "consistency {:.2e}, unit-speed drift {:.2e}",
            run.consistency, run.max_unit_drift
        ),
    );
}

/// Curvature with `m`-fold symmetry and mean 1: the tangent turns by
/// `2π/m` over each period, so the `m` congruent arcs close up.
fn symmetric_loop(g: &Grid, rng: &mut ChaCha8Rng) -> Curvature {
    let m = rng.gen_range(2..=5);
    let modes: Vec<(f64, f64, f64)> = (1..=12 / m)
        .map(|j| {
            let w = 0.4 / (j * j) as f64;
            ((j * m) as f64, w * rng.gen_range(-1.0..1.0), w * rng.gen_range(-1.0..1.0))
        })
        .collect();
    Curvature::from_fn(g, |s| {
        1.0 + modes
            .iter()
            .map(|(f, a, b)| a * (f * s).cos() + b * (f * s).sin())
            .sum::<f64>()
    })
    .unwrap()
}

#[test]
fn criterion_08_tjurin_identities() {
    let t0 = Instant::now();
    let g = Grid::new(256).unwrap();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut r3max, mut r4max, mut defect): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..20 {
        let k = symmetric_loop(&g, &mut rng);
        let (z, d) = immersion_of(&k, 0.0, Complex::new(0.0, 0.0), &tol).unwrap();
        let (r3, r4) = tjurin_identity_residuals(&z, &tol).unwrap();
        r3max = r3max.max(r3);
        r4max = r4max.max(r4);
        defect = defect.max(d);
    }
    report(
        8,
        "Tjurin identities",
        r3max <= 1e-7 && r4max <= 1e-7 && defect <= 1e-10,
        t0,
        format!("20 loops: r3 {r3max:.2e}, r4 {r4max:.2e}, closure {defect:.2e}"),
    );
}

#[test]
fn criterion_09_faber_grunsky() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();

    let bare = Coefficients::exact(Vec::<BigRational>::new());
    let p = faber_polynomials(&bare, 12).unwrap();
    let mono = (0..=12).all(|n| {
        let w = (0..n).fold(MPoly::one(), |acc, _| acc.mul(&MPoly::w()));
        p[n] == w
    });
    if !mono {
        failures.push("P_n != w^n for a = 0");
    }

    let sym = Coefficients::exact((1..12).map(MPoly::a).collect());
    let mut agree = faber_polynomials_in(&sym, 8).unwrap() == faber_by_recurrence(&sym, 8).unwrap();
    for _ in 0..5 {
        let lifted = Coefficients::truncated(
            random_rationals(&mut rng, 11)
                .into_iter()
                .map(MPoly::constant)
                .collect(),
        );
        agree &= faber_polynomials_in(&lifted, 12).unwrap() == faber_by_recurrence(&lifted, 12).unwrap();
    }
    if !agree {
        failures.push("generating function and recurrence disagree");
    }

    let symmetric = (0..10).all(|_| {
        let a = Coefficients::truncated(random_rationals(&mut rng, 23));
        grunsky(&a, 12).unwrap().is_symmetric()
    });
    if !symmetric {
        failures.push("Grunsky matrix not symmetric");
    }

    let a1 = rat(-2, 5);
    let h = grunsky(&Coefficients::exact(vec![a1.clone()]), 12).unwrap();
    let closed = (1..=12).all(|m| {
        (1..=12).all(|n| {
            let expect = if m == n {
                -num_traits::pow(a1.clone(), m) / rat(m as i64, 1)
            } else {
                rat(0, 1)
            };
            *h.get(m, n) == expect
        })
    });
    if !closed {
        failures.push("h_mn closed form for 1/q + a1 q");
    }

    let mut schwarzian = schwarzian_grunsky_check(&Coefficients::exact(vec![a1]), 12)
        .unwrap()
        .is_zero_through(10);
    for _ in 0..3 {
        let a = Coefficients::truncated(random_rationals(&mut rng, 11));
        schwarzian &= schwarzian_grunsky_check(&a, 12).unwrap().is_zero_through(10);
    }
    if !schwarzian {
        failures.push("Schwarzian-Grunsky residual nonzero through order 10");
    }

    report(
        9,
        "Faber/Grunsky",
        failures.is_empty(),
        t0,
        if failures.is_empty() {
            "all exact identities hold".into()
        } else {
            failures.join("; ")
        },
    );
}

#[test]
fn criterion_10_bridge_identity() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let exact = (0..3).all(|_| {
        let a = Coefficients::truncated(random_rationals(&mut rng, 6));
        bridge_check(&a, 6).unwrap().is_zero_through(6)
    });

    let k = standard(256);
    let (z, _) = immersion_of(&k, 0.0, Complex::new(0.0, 0.0), &Tolerances::default()).unwrap();
    let a = Coefficients::truncated(z.taylor_coefficients(6));
    let float = bridge_check(&a, 6).unwrap().max_magnitude_through(6);
    report(
        10,
        "bridge identity",
        exact && float <= 1e-8,
        t0,
        format!("rational residual zero: {exact}; float residual {float:.2e}"),
    );
}

/// Complete elliptic integral `K(m)` by the arithmetic-geometric mean.
fn elliptic_k(m: f64) -> f64 {
    let (mut a, mut b) = (1.0, (1.0 - m).sqrt());
    while (a - b).abs() > 1e-16 {
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    PI / (2.0 * a)
}

#[test]
fn criterion_11_elastica() {
    let t0 = Instant::now();
    // k = 2ω√m·cn(ωs | m) solves k_ss + k³/2 = ω²(2m − 1)k with period 2π
    // when ω = 2K(m)/π.
    let m = 0.3;
    let omega = 2.0 * elliptic_k(m) / PI;
    let p = ElasticaParams {
        lambda: omega * omega * (2.0 * m - 1.0),
        mu: 0.0,
    };
    let g = Grid::new(128).unwrap();
    let amp = 2.0 * omega * m.sqrt();
    let guess = Curvature::from_fn(&g, |s| amp * s.cos() + 0.05 * (3.0 * s).cos()).unwrap();
    let k = elastica_solve(&p, &guess, &ElasticaOptions::default()).unwrap();
    let (ode, flow_res) = elastica_residuals(&k, &p).unwrap();
    let peak = k.values().iter().cloned().fold(f64::MIN, f64::max);
    let ok = ode <= 1e-10 && flow_res <= 1e-6 && (peak - amp).abs() < 1e-8;
    report(
        11,
        "elastica",
        ok,
        t0,
        format!("ODE residual {ode:.2e}, |K_2 - lambda k_s| {flow_res:.2e}, peak {peak:.10} vs {amp:.10}"),
    );
}

#[test]
fn criterion_12_convergence_orders() {
    let t0 = Instant::now();
    let opts = IntegrateOptions {
        record_every: usize::MAX,
        ..Default::default()
    };
    let coarse = integrate(&standard(128), 2, 0.1, 1e-4, &opts).unwrap();
    let fine = integrate(&standard(256), 2, 0.1, 1e-4, &opts).unwrap();
    let fine_on_coarse: Vec<f64> = fine.final_state().values().iter().step_by(2).copied().collect();
    let refine = sup_diff(coarse.final_state().values(), &fine_on_coarse);

    let k = standard(256);
    let finals: Vec<Vec<f64>> = [1e-3, 5e-4, 2.5e-4]
        .iter()
        .map(|&dt| integrate(&k, 2, 0.1, dt, &opts).unwrap().final_state().values().to_vec())
        .collect();
    let ratio = sup_diff(&finals[0], &finals[1]) / sup_diff(&finals[1], &finals[2]);
    report(
        12,
        "convergence orders",
        refine <= 1e-6 && (8.0..=32.0).contains(&ratio),
        t0,
        format!("N 128 -> 256 change {refine:.2e}; dt-halving ratio {ratio:.2}"),
    );
}
