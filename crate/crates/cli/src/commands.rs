use std::f64::consts::TAU;

use elastica_mkdv::deform::{ell, isometry_residuals};
use elastica_mkdv::faber::{
    bridge_check, expansion_coefficients, faber_polynomials, faber_symbolic, grunsky, schwarzian_grunsky_check,
    Coefficients, Ring,
};
use elastica_mkdv::flow::{
    elastica_residuals, elastica_solve, evolve_immersion, integrate, ElasticaOptions, ElasticaParams,
    IntegrateOptions,
};
use elastica_mkdv::hierarchy::{self, Hierarchy};
use elastica_mkdv::io::{self, LoopSpec};
use elastica_mkdv::jetalg::format as jetfmt;
use elastica_mkdv::loopgeom::{closure_defect, energy, immersion_of, tjurin_identity_residuals, winding};
use elastica_mkdv::{Curvature, Error, Loop};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{at_least, positive, Format, RunConfig};
use crate::error::CliError;
use crate::output::Output;

pub const MAX_HIERARCHY: usize = 6;
const COMMUTATOR_PAIRS: [(usize, usize); 3] = [(1, 2), (1, 3), (2, 3)];

pub fn hierarchy(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let n_max = cfg.n_max.unwrap_or(4);
    if !(1..=MAX_HIERARCHY).contains(&n_max) {
        return Err(CliError::Usage(format!(
            "n_max must lie in 1..={MAX_HIERARCHY}, got {n_max}"
        )));
    }
    let h = Hierarchy::build(n_max)?;
    let mut text = String::new();
    let mut latex = String::from("\\begin{align*}\n");
    let mut flows = Vec::new();
    for f in h.flows() {
        text.push_str(&format!("K_{} = {}\n", f.index, f.rhs));
        latex.push_str(&format!("K_{{{}}} &= {} \\\\\n", f.index, jetfmt::to_latex(&f.rhs)));
        flows.push(json!({
            "n": f.index,
            "text": f.rhs.to_string(),
            "terms": jetfmt::to_json_terms(&f.rhs),
            "latex": jetfmt::to_latex(&f.rhs),
            "certificate": f.certificate.as_ref().map(|c| c.to_string()),
        }));
    }
    latex.push_str("\\end{align*}\n");

    let mut brackets = Vec::new();
    for (i, j) in COMMUTATOR_PAIRS.into_iter().filter(|&(_, j)| j <= n_max) {
        let b = hierarchy::check_commute(i, j)?;
        if !b.is_zero() {
            return Err(CliError::Symbolic(format!("[K_{i}, K_{j}] = {b}")));
        }
        brackets.push(json!({"i": i, "j": j, "bracket": b.to_string()}));
    }

    out.text("hierarchy.txt", &text)?;
    if cfg.wants(Format::Json) {
        out.json("hierarchy.json", &json!({ "flows": flows }))?;
        out.json("commutators.json", &json!({ "pairs": brackets }))?;
    }
    if cfg.wants(Format::Latex) {
        out.text("hierarchy.tex", &latex)?;
    }
    Ok(json!({"n_max": n_max, "commutators": brackets.len()}))
}

fn integrate_options(cfg: &RunConfig) -> IntegrateOptions {
    let d = IntegrateOptions::default();
    IntegrateOptions {
        mode: cfg.mode.unwrap_or(d.mode),
        scheme: cfg.scheme.unwrap_or(d.scheme),
        record_every: cfg.record_every.unwrap_or(d.record_every),
        tol: cfg.tol(),
        ..d
    }
}

pub fn simulate(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let spec = cfg.loop_spec()?;
    at_least("n", cfg.n.unwrap_or(2), 1)?;
    at_least("record_every", cfg.record_every.unwrap_or(1), 1)?;
    let Some(dts) = cfg.sweep_dt.clone() else {
        return simulate_one(cfg, &spec, out);
    };
    if dts.is_empty() {
        return Err(CliError::Usage("sweep_dt is empty".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep_threads())
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let runs: Vec<(f64, Result<Value, CliError>)> = pool.install(|| {
        dts.par_iter()
            .enumerate()
            .map(|(i, &dt)| {
                let sub = RunConfig {
                    dt: Some(dt),
                    sweep_dt: None,
                    ..cfg.clone()
                };
                let run = Output::create(&out.dir().join(format!("sweep_{i:03}")))
                    .and_then(|o| o.manifest("simulate", &sub).map(|_| o))
                    .and_then(|o| simulate_one(&sub, &spec, &o));
                (dt, run)
            })
            .collect()
    });
    let summary: Vec<Value> = runs
        .iter()
        .map(|(dt, r)| match r {
            Ok(v) => json!({"dt": dt, "exit_code": 0, "summary": v}),
            Err(e) => json!({"dt": dt, "exit_code": e.exit_code(), "error": e.to_string()}),
        })
        .collect();
    out.json("sweep.json", &json!({ "runs": summary }))?;
    match runs.into_iter().find_map(|(_, r)| r.err()) {
        Some(e) => Err(e),
        None => Ok(json!({ "runs": summary })),
    }
}

/// Worker count for sweeps, capped by `ELASTICA_MKDV_THREADS`.
pub fn sweep_threads() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    std::env::var("ELASTICA_MKDV_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .map_or(available, |cap| cap.min(available))
}

fn simulate_one(cfg: &RunConfig, spec: &LoopSpec, out: &Output) -> Result<Value, CliError> {
    let tol = cfg.tol();
    let n = cfg.n.unwrap_or(2);
    let dt = positive("dt", cfg.dt.unwrap_or(1e-4))?;
    let t_end = positive("T", cfg.t_end.unwrap_or(0.1))?;
    if t_end < dt {
        return Err(CliError::Usage(format!("T = {t_end} is shorter than dt = {dt}")));
    }
    let opts = integrate_options(cfg);

    let mut summary = json!({});
    let (traj, loops) = if cfg.immersion.unwrap_or(false) {
        let (z0, _) = spec.immersion(&tol)?;
        let run = evolve_immersion(&z0, n, t_end, dt, &opts)?;
        summary["consistency"] = json!(run.consistency);
        summary["max_unit_drift"] = json!(run.max_unit_drift);
        summary["max_loop_closure_defect"] = json!(run.max_closure_defect);
        (run.curvature, Some(run.snapshots))
    } else {
        let k0 = spec.curvature(&tol)?;
        let traj = integrate(&k0, n, t_end, dt, &opts)?;
        let loops: Option<Vec<Loop>> = traj
            .states
            .iter()
            .map(|k| immersion_of(k, 0.0, Complex::new(0.0, 0.0), &tol).ok().map(|r| r.0))
            .collect();
        (traj, loops)
    };

    let energy_drift = traj.energy_drift();
    let mean_drift = traj.mean_drift();
    let closure = traj.max_closure_defect();
    summary["n"] = json!(n);
    summary["dt"] = json!(dt);
    summary["T"] = json!(t_end);
    summary["records"] = json!(traj.times.len());
    summary["energy_drift"] = json!(energy_drift);
    summary["mean_drift"] = json!(mean_drift);
    summary["max_closure_defect"] = json!(closure);

    if cfg.wants(Format::Csv) {
        out.text("trajectory.csv", &io::trajectory_csv(&traj))?;
        if let Some(z) = loops.as_ref().and_then(|l| l.last()) {
            out.text("final_loop.csv", &io::loop_csv(traj.final_state(), z))?;
        }
    }
    if cfg.wants(Format::Json) {
        out.json("snapshots.json", &io::snapshots_json(&traj, loops.as_deref()))?;
    }
    if cfg.wants(Format::Svg) {
        if let Some(l) = &loops {
            out.text("filmstrip.svg", &io::filmstrip_svg(l))?;
        }
    }

    let energy_tol = cfg.energy_tol.unwrap_or(1e-6);
    let mean_tol = cfg.mean_drift_tol.unwrap_or(1e-10);
    let closure_tol = cfg.closure_tol.unwrap_or(1e-6) * TAU;
    let mut breaches = Vec::new();
    if !(energy_drift <= energy_tol) {
        breaches.push(format!("energy drift {energy_drift:e} > {energy_tol:e}"));
    }
    if !(mean_drift <= mean_tol) {
        breaches.push(format!("mean curvature drift {mean_drift:e} > {mean_tol:e}"));
    }
    if !(closure <= closure_tol) {
        breaches.push(format!("closure defect {closure:e} > {closure_tol:e}"));
    }
    summary["passed"] = json!(breaches.is_empty());
    summary["breaches"] = json!(breaches);
    out.json("summary.json", &summary)?;
    if breaches.is_empty() {
        Ok(summary)
    } else {
        Err(CliError::Breach(breaches.join("; ")))
    }
}

pub fn invariants(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let tol = cfg.tol();
    let spec = cfg.loop_spec()?;
    let k = spec.curvature(&tol)?;
    let w = winding(&k, &tol)?;
    let defect = closure_defect(&k);
    let closed = defect <= cfg.closure_tol.unwrap_or(1e-6) * TAU;
    let (r3, r4) = if closed {
        let (z, _) = spec.immersion(&tol)?;
        let (r3, r4) = tjurin_identity_residuals(&z, &tol)?;
        (Some(r3), Some(r4))
    } else {
        (None, None)
    };
    let report = json!({
        "energy": energy(&k),
        "winding": w,
        "closure_defect": defect,
        "closed": closed,
        "tjurin_r3": r3,
        "tjurin_r4": r4,
    });
    out.json("invariants.json", &report)?;
    Ok(report)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesSpec {
    a: Vec<String>,
    order: Option<usize>,
}

/// Coefficients and order from `--a`/`--order`, falling back to the
/// `{"a": [...], "order": N}` file named by `input`.
fn series_input(cfg: &RunConfig, default_order: usize) -> Result<(Vec<String>, usize), CliError> {
    let file = match &cfg.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            Some(
                serde_json::from_str::<SeriesSpec>(&text)
                    .map_err(|e| Error::Parse(format!("series spec: {e}")))?,
            )
        }
        None => None,
    };
    let (fa, fo) = file.map_or((None, None), |f| (Some(f.a), f.order));
    let a = cfg.a.clone().or(fa).unwrap_or_default();
    let order = cfg.order.or(fo).unwrap_or(default_order);
    Ok((a, order))
}

pub fn faber(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let (raw, order) = series_input(cfg, 5)?;
    at_least("order", order, 1)?;
    let a = Coefficients::parse(&raw, !cfg.truncated.unwrap_or(false))?;
    let m = at_least("grunsky_order", cfg.grunsky_order.unwrap_or(order), 1)?;

    let polys = if cfg.symbolic.unwrap_or(false) {
        faber_symbolic(order)
    } else {
        faber_polynomials(&a, order)?
    };
    let h = grunsky(&a, m)?;
    let check = schwarzian_grunsky_check(&a, order.max(2))?;
    let through = order.max(2) as i64 - 2;
    if !check.is_zero_through(through) {
        return Err(CliError::Symbolic(format!("Schwarzian-Grunsky residual {check}")));
    }

    let poly_json: Vec<Value> = polys
        .iter()
        .enumerate()
        .map(|(n, p)| json!({"n": n, "text": p.to_string(), "latex": p.to_latex()}))
        .collect();
    let report = json!({
        "a": raw,
        "exact": a.is_exact(),
        "order": order,
        "polynomials": poly_json,
        "grunsky": h.to_json(),
        "grunsky_symmetric": h.is_symmetric(),
        "schwarzian_grunsky_residual": check.to_json(),
    });
    if cfg.wants(Format::Json) {
        out.json("faber.json", &report)?;
    }
    if cfg.wants(Format::Latex) {
        let mut tex = String::from("\\begin{align*}\n");
        for (n, p) in polys.iter().enumerate() {
            tex.push_str(&format!("P_{{{n}}}(w) &= {} \\\\\n", p.to_latex()));
        }
        tex.push_str("\\end{align*}\n\\[\nh = ");
        tex.push_str(&h.to_latex());
        tex.push_str("\n\\]\n");
        out.text("faber.tex", &tex)?;
    }
    Ok(report)
}

/// A random band-limited `vi` with `∮ k·vi ds = 0`.
fn random_isometric_direction(k: &Curvature, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let grid = k.grid();
    let modes = grid.band().clamp(1, 8);
    let coeffs: Vec<(f64, f64)> = (1..=modes)
        .map(|m| {
            let w = 1.0 / (m * m) as f64;
            (w * rng.gen_range(-1.0..1.0), w * rng.gen_range(-1.0..1.0))
        })
        .collect();
    let vi = grid.sample(|s| {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, (a, b))| {
                let m = (j + 1) as f64;
                a * (m * s).cos() + b * (m * s).sin()
            })
            .sum()
    });
    let kk = grid.mean(&grid.mul(k.values(), k.values()));
    let c = grid.mean(&grid.mul(k.values(), &vi)) / kk;
    vi.iter().zip(k.values()).map(|(v, kv)| v - c * kv).collect()
}

pub fn deform_check(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let tol = cfg.tol();
    let k = cfg.loop_spec()?.curvature(&tol)?;
    let rc2_tol = cfg.residual_tol.unwrap_or(1e-9);
    let rc1_tol = 1e-6;

    let v = ell(&k, &k.derivative(1), &tol)?;
    let base = isometry_residuals(&k, &v, &tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let mut random = Vec::new();
    let mut worst = (base.rc2, base.rc1.unwrap_or(0.0));
    for _ in 0..cfg.random_fields.unwrap_or(0) {
        let vi = random_isometric_direction(&k, &mut rng);
        let r = isometry_residuals(&k, &ell(&k, &vi, &tol)?, &tol)?;
        worst = (worst.0.max(r.rc2), worst.1.max(r.rc1.unwrap_or(0.0)));
        random.push(json!({"rc2": r.rc2, "rc1": r.rc1}));
    }
    let report = json!({
        "field": "ell(k, k_s)",
        "rc2": base.rc2,
        "rc1": base.rc1,
        "seed": cfg.seed(),
        "random_fields": random,
    });
    if cfg.wants(Format::Json) {
        out.json("deform_check.json", &report)?;
        out.json("deformation.json", &io::deformation_json(k.grid(), &v))?;
    }
    if worst.0 > rc2_tol || worst.1 > rc1_tol {
        return Err(CliError::Breach(format!(
            "isometry residuals rc2 = {:e} (tol {rc2_tol:e}), rc1 = {:e} (tol {rc1_tol:e})",
            worst.0, worst.1
        )));
    }
    Ok(report)
}

fn oscillation(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), x| (lo.min(*x), hi.max(*x)));
    hi - lo
}

pub fn elastica(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    let tol = cfg.tol();
    let lambda = cfg
        .lambda
        .ok_or_else(|| CliError::Usage("elastica needs --lambda".into()))?;
    let mu = cfg.mu.unwrap_or(0.0);
    let p = ElasticaParams { lambda, mu };
    let guess = cfg.loop_spec()?.curvature(&tol)?;
    let opts = ElasticaOptions {
        residual_tol: cfg.residual_tol.unwrap_or(1e-10),
        ..Default::default()
    };
    let k = elastica_solve(&p, &guess, &opts)?;
    if oscillation(k.values()) < opts.collapse_tol {
        return Err(Error::ConstantCollapse { value: k.mean() }.into());
    }
    let (ode, flow) = elastica_residuals(&k, &p)?;
    let report = json!({
        "lambda": lambda,
        "mu": mu,
        "ode_residual": ode,
        "flow_residual": flow,
        "mean": k.mean(),
        "energy": energy(&k),
        "curvature": io::grid_function_json(k.grid(), k.values()),
    });
    if cfg.wants(Format::Json) {
        out.json("elastica.json", &report)?;
    }
    if let Ok((z, _)) = immersion_of(&k, 0.0, Complex::new(0.0, 0.0), &tol) {
        if cfg.wants(Format::Csv) {
            out.text("elastica.csv", &io::loop_csv(&k, &z))?;
        }
        if cfg.wants(Format::Svg) {
            out.text("elastica.svg", &io::loop_svg(&z))?;
        }
    }
    if flow > 1e-6 {
        return Err(CliError::Breach(format!("flow residual {flow:e} > 1e-6")));
    }
    Ok(report)
}

pub fn bridge(cfg: &RunConfig, out: &Output) -> Result<Value, CliError> {
    if cfg.kdv.unwrap_or(false) {
        let b = hierarchy::kdv_bridge_check()?;
        if !b.residual.is_zero() {
            return Err(CliError::Symbolic(format!("Miura residual {}", b.residual)));
        }
        let report = json!({
            "alpha": b.alpha.to_string(),
            "beta": b.beta.to_string(),
            "residual": b.residual.to_string(),
        });
        out.json("kdv_bridge.json", &report)?;
        return Ok(report);
    }

    let order = at_least("order", cfg.order.unwrap_or(6), 1)?;
    if let Some(raw) = &cfg.a {
        let a = Coefficients::parse(raw, !cfg.truncated.unwrap_or(false))?;
        let r = bridge_check(&a, order)?;
        let e = expansion_coefficients(&a, order)?;
        if !r.is_zero_through(order) {
            return Err(CliError::Symbolic("bridge residual is not the zero series".into()));
        }
        let report = json!({
            "order": order,
            "residual_zero": true,
            "residual": r.to_json(),
            "expansion": e.to_json(),
        });
        out.json("bridge.json", &report)?;
        return Ok(report);
    }

    let tol = cfg.tol();
    let (z, _) = cfg.loop_spec()?.immersion(&tol)?;
    let a = Coefficients::truncated(z.taylor_coefficients(order));
    let r = bridge_check(&a, order)?;
    let e = expansion_coefficients(&a, order)?;
    let max_abs = r.max_magnitude_through(order);
    let report = json!({
        "order": order,
        "max_abs_residual": max_abs,
        "residual": r.to_json(),
        "expansion": e.to_json(),
    });
    out.json("bridge.json", &report)?;
    let limit = cfg.residual_tol.unwrap_or(1e-8);
    if !(max_abs <= limit) {
        return Err(CliError::Breach(format!("bridge residual {max_abs:e} > {limit:e}")));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use elastica_mkdv::Grid;

    #[test]
    fn random_directions_are_admissible() {
        let g = Grid::new(64).unwrap();
        let k = Curvature::from_fn(&g, |s| 1.0 + 0.5 * (2.0 * s).cos()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let vi = random_isometric_direction(&k, &mut rng);
        assert!(g.mean(&g.mul(k.values(), &vi)).abs() < 1e-14);
        let again = random_isometric_direction(&k, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(vi, again);
    }

    #[test]
    fn thread_cap_is_positive() {
        assert!(sweep_threads() >= 1);
    }
}
