use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy;
use crate::loopgeom::CurvatureField;
use crate::scalar::{lit, sup_diff, sup_norm, to_f64, Real};
use crate::spectral::Grid;

/// Constants of the once-integrated stationary equation
/// `k_ss + k³/2 = λ k + μ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElasticaParams {
    pub lambda: f64,
    pub mu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ElasticaOptions {
    pub max_iter: usize,
    pub residual_tol: f64,
    pub collapse_tol: f64,
}

impl Default for ElasticaOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            residual_tol: 1e-10,
            collapse_tol: 1e-8,
        }
    }
}

fn oscillation<T: Real>(v: &[T]) -> T {
    let (lo, hi) = v
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(l, h), x| (l.min(*x), h.max(*x)));
    hi - lo
}

/// Pointwise `k_ss + k³/2 − λk − μ`.
fn ode_residual<T: Real>(k: &CurvatureField<T>, p: &ElasticaParams) -> Vec<T> {
    let (lambda, mu): (T, T) = (lit(p.lambda), lit(p.mu));
    let half: T = lit(0.5);
    k.derivative(2)
        .into_iter()
        .zip(k.values())
        .map(|(kss, &x)| kss + half * x * x * x - lambda * x - mu)
        .collect()
}

/// `(sup |k_ss + k³/2 − λk − μ|, sup |K_2(k) − λ ∂_s k|)`.
pub fn elastica_residuals<T: Real>(k: &CurvatureField<T>, p: &ElasticaParams) -> Result<(T, T)> {
    let ode = sup_norm(&ode_residual(k, p));
    let k2 = hierarchy::flow(2)?.rhs.evaluate(&k.jets(3));
    let lambda: T = lit(p.lambda);
    let ks: Vec<T> = k.derivative(1).iter().map(|v| *v * lambda).collect();
    Ok((ode, sup_diff(&k2, &ks)))
}

/// Moves the maximum of `k` to `s = 0` and keeps the even part.
fn phase_fix<T: Real>(k: &CurvatureField<T>) -> Vec<Complex<T>> {
    let grid = k.grid();
    let idx = k
        .values()
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > k.values()[best] { i } else { best });
    let d1 = grid.derivative_spec(k.spectrum(), 1);
    let d2 = grid.derivative_spec(k.spectrum(), 2);
    let mut s = grid.nodes()[idx];
    for _ in 0..20 {
        let f1 = grid.interpolate(&d1, s).re;
        let f2 = grid.interpolate(&d2, s).re;
        if f2 >= T::zero() {
            break;
        }
        let ds = f1 / f2;
        s -= ds;
        if ds.abs() < T::epsilon() * lit(16.0) {
            break;
        }
    }
    grid.shift_spec(k.spectrum(), s)
        .into_iter()
        .map(|c| Complex::new(c.re, T::zero()))
        .collect()
}

fn cos_coeffs<T: Real>(grid: &Grid<T>, spec: &[Complex<T>]) -> Vec<f64> {
    spec[..=grid.band()].iter().map(|c| to_f64(c.re)).collect()
}

fn from_cos<T: Real>(grid: &Grid<T>, a: &[f64]) -> Vec<Complex<T>> {
    let n = grid.len();
    let mut spec = vec![Complex::new(T::zero(), T::zero()); n];
    spec[0] = Complex::new(lit(a[0]), T::zero());
    for (m, v) in a.iter().enumerate().skip(1) {
        spec[m] = Complex::new(lit(*v), T::zero());
        spec[n - m] = spec[m];
    }
    spec
}

/// Dealiased residual in even (cosine) coordinates.
fn galerkin_residual<T: Real>(
    grid: &Grid<T>,
    a: &[f64],
    p: &ElasticaParams,
) -> (Vec<f64>, CurvatureField<T>) {
    let k = CurvatureField::from_spectrum(grid, from_cos(grid, a));
    let mut spec = grid.forward(&ode_residual(&k, p));
    grid.dealias_spec(&mut spec);
    (cos_coeffs(grid, &spec), k)
}

fn jacobian<T: Real>(grid: &Grid<T>, k: &CurvatureField<T>, p: &ElasticaParams) -> DMatrix<f64> {
    let dim = grid.band() + 1;
    let lambda: T = lit(p.lambda);
    let coef: Vec<T> = k
        .values()
        .iter()
        .map(|x| lit::<T>(1.5) * *x * *x - lambda)
        .collect();
    let mut jac = DMatrix::zeros(dim, dim);
    let mut e = vec![0.0; dim];
    for col in 0..dim {
        e.fill(0.0);
        e[col] = 1.0;
        let spec = from_cos::<T>(grid, &e);
        let dk = grid.inverse(&spec);
        let dkss = grid.inverse(&grid.derivative_spec(&spec, 2));
        let out: Vec<T> = (0..grid.len()).map(|i| dkss[i] + coef[i] * dk[i]).collect();
        let mut s = grid.forward(&out);
        grid.dealias_spec(&mut s);
        for (row, v) in cos_coeffs(grid, &s).into_iter().enumerate() {
            jac[(row, col)] = v;
        }
    }
    jac
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Periodic solution of `k_ss + k³/2 = λk + μ` by spectral Newton from
/// `guess`. The result is phase-fixed with its maximum at `s = 0`.
pub fn elastica_solve<T: Real>(
    p: &ElasticaParams,
    guess: &CurvatureField<T>,
    opts: &ElasticaOptions,
) -> Result<CurvatureField<T>> {
    let grid = guess.grid().clone();
    if to_f64(oscillation(guess.values())) < opts.collapse_tol {
        return constant_root(&grid, to_f64(guess.mean()), p, opts);
    }
    let mut a = cos_coeffs(&grid, &phase_fix(guess));
    let (mut r, mut k) = galerkin_residual(&grid, &a, p);
    for _ in 0..opts.max_iter {
        let pointwise = to_f64(sup_norm(&ode_residual(&k, p)));
        if pointwise <= opts.residual_tol {
            let fixed = CurvatureField::from_spectrum(&grid, phase_fix(&k));
            return Ok(fixed);
        }
        let jac = jacobian(&grid, &k, p);
        let rhs = DVector::from_iterator(r.len(), r.iter().map(|v| -v));
        let delta = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NotInvertible("elastica Jacobian".into()))?;
        let norm0 = max_abs(&r);
        let mut step = 1.0;
        loop {
            let trial: Vec<f64> = a.iter().zip(delta.iter()).map(|(x, d)| x + step * d).collect();
            let (rt, kt) = galerkin_residual(&grid, &trial, p);
            if max_abs(&rt) < norm0 || step < 1e-3 {
                a = trial;
                r = rt;
                k = kt;
                break;
            }
            step *= 0.5;
        }
        if to_f64(oscillation(k.values())) < opts.collapse_tol {
            return Err(Error::ConstantCollapse {
                value: to_f64(k.mean()),
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: to_f64(sup_norm(&ode_residual(&k, p))),
    })
}

fn constant_root<T: Real>(
    grid: &Grid<T>,
    c0: f64,
    p: &ElasticaParams,
    opts: &ElasticaOptions,
) -> Result<CurvatureField<T>> {
    let g = |c: f64| 0.5 * c * c * c - p.lambda * c - p.mu;
    let mut c = c0;
    for _ in 0..opts.max_iter {
        if g(c).abs() <= opts.residual_tol {
            return Ok(CurvatureField::constant(grid, lit(c)));
        }
        let d = 1.5 * c * c - p.lambda;
        if d == 0.0 {
            break;
        }
        c -= g(c) / d;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: g(c).abs(),
    })
}
