//! Time integration of the hierarchy flows `∂_t k = K_n` on loops,
//! conservation monitoring, the co-evolution of the immersion and
//! periodic elastica.

mod elastica;
mod immersion;
mod stepper;

pub use elastica::{elastica_residuals, elastica_solve, ElasticaOptions, ElasticaParams};
pub use immersion::{evolve_immersion, ImmersionRun};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::deform::omega2_numeric;
use crate::error::{Error, Result};
use crate::hierarchy::{self, zero_mean_gauge};
use crate::jetalg::DiffPoly;
use crate::loopgeom::{closure_defect, energy, CurvatureField, Tolerances};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::Grid;

/// How the right-hand side `K_n(k)` is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsMode {
    /// `n − 1` numeric applications of `Ω_II` to `∂_s k`, each with the
    /// zero-mean antiderivative.
    #[default]
    Iterated,
    /// The cached symbolic `K_j`, combined with the constants `β_j` that
    /// reproduce the zero-mean antiderivative of [`RhsMode::Iterated`].
    Symbolic,
    /// The symbolic `K_n` alone.
    Literal,
}

/// Time-stepping scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Classical RK4 on the nonlinear remainder in the integrating-factor
    /// frame of the constant-coefficient linear part.
    #[default]
    IfRk4,
    /// Two-stage Gauss–Legendre collocation (order 4), solved by
    /// simplified Newton.
    GaussLegendre4,
}

/// The vector field `k ↦ K_n(k)` together with its symbolic data.
#[derive(Clone, Debug)]
pub struct FlowField {
    n: usize,
    mode: RhsMode,
    tol: Tolerances,
    polys: Vec<DiffPoly>,
    certs: Vec<DiffPoly>,
}

impl FlowField {
    pub fn new(n: usize, mode: RhsMode, tol: Tolerances) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("flow index must be at least 1".into()));
        }
        let mut polys = Vec::with_capacity(n);
        let mut certs = Vec::with_capacity(n);
        for j in 1..=n {
            let f = hierarchy::flow(j)?;
            polys.push(f.rhs);
            if let Some(c) = f.certificate {
                certs.push(c);
            }
        }
        Ok(Self {
            n,
            mode,
            tol,
            polys,
            certs,
        })
    }

    pub fn index(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> RhsMode {
        self.mode
    }

    /// Coefficients `β_j` with `flow = Σ_j β_j K_j` on the given loop.
    pub fn beta<T: Real>(&self, k: &CurvatureField<T>) -> Vec<T> {
        match self.mode {
            RhsMode::Literal => {
                let mut b = vec![T::zero(); self.n];
                b[self.n - 1] = T::one();
                b
            }
            RhsMode::Iterated | RhsMode::Symbolic => {
                let jets = k.jets(2 * self.n - 1);
                let means: Vec<T> = self
                    .certs
                    .iter()
                    .map(|q| k.grid().mean(&q.evaluate(&jets)))
                    .collect();
                zero_mean_gauge(self.n, &means)
            }
        }
    }

    /// `mean(D_s⁻¹(u_0 K_{n−1}))` on `k`: the constant separating the
    /// symbolic `K_n` from one zero-mean application of `Ω_II` to
    /// `K_{n−1}`.
    pub fn literal_gauge_shift<T: Real>(&self, k: &CurvatureField<T>) -> T {
        match self.certs.last() {
            Some(q) => k.grid().mean(&q.evaluate(&k.jets(2 * self.n - 1))),
            None => T::zero(),
        }
    }

    /// `K_n(k)`, dealiased.
    pub fn eval<T: Real>(&self, k: &CurvatureField<T>) -> Result<Vec<T>> {
        let grid = k.grid();
        match self.mode {
            RhsMode::Iterated => {
                let mut f = k.derivative(1);
                for _ in 1..self.n {
                    f = omega2_numeric(k, &f, &self.tol)?;
                }
                Ok(f)
            }
            RhsMode::Symbolic | RhsMode::Literal => {
                let beta = self.beta(k);
                let jets = k.jets(2 * self.n - 1);
                let mut out = vec![T::zero(); grid.len()];
                for (p, b) in self.polys.iter().zip(&beta) {
                    if *b == T::zero() {
                        continue;
                    }
                    for (o, v) in out.iter_mut().zip(p.evaluate(&jets)) {
                        *o += *b * v;
                    }
                }
                Ok(grid.dealias(&out))
            }
        }
    }

    /// Fourier symbol of the linearization about the constant `kbar`.
    pub(crate) fn linear_symbol<T: Real>(
        &self,
        grid: &Grid<T>,
        beta: &[T],
        kbar: T,
    ) -> Vec<Complex<T>> {
        let mut coeffs: Vec<(usize, T)> = Vec::new();
        for (p, b) in self.polys.iter().zip(beta) {
            for (i, c) in p.linearization_at_constant(kbar) {
                coeffs.push((i, *b * c));
            }
        }
        (0..grid.len())
            .map(|idx| {
                if grid.wavenumber(idx).unsigned_abs() as usize > grid.band() {
                    return Complex::new(T::zero(), T::zero());
                }
                let ik = Complex::new(T::zero(), lit::<T>(grid.wavenumber(idx) as f64));
                coeffs
                    .iter()
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (i, c)| {
                        acc + ik.powi(*i as i32) * *c
                    })
            })
            .collect()
    }

    /// Profiles `p_i(s) = Σ_j β_j ∂K_j/∂u_i` at `k`, so that the
    /// linearized flow is `δk ↦ Σ_i p_i ∂_s^i δk`.
    pub(crate) fn partial_profiles<T: Real>(
        &self,
        k: &CurvatureField<T>,
        beta: &[T],
    ) -> Vec<(usize, Vec<T>)> {
        let jets = k.jets(2 * self.n - 1);
        (0..2 * self.n)
            .filter_map(|i| {
                let mut prof = vec![T::zero(); k.grid().len()];
                let mut any = false;
                for (p, b) in self.polys.iter().zip(beta) {
                    let dp = p.partial(i);
                    if dp.is_zero() || *b == T::zero() {
                        continue;
                    }
                    any = true;
                    for (o, v) in prof.iter_mut().zip(dp.evaluate(&jets)) {
                        *o += *b * v;
                    }
                }
                any.then_some((i, prof))
            })
            .collect()
    }
}

/// `K_n(k)` evaluated in the given mode.
pub fn rhs<T: Real>(
    k: &CurvatureField<T>,
    n: usize,
    mode: RhsMode,
    tol: &Tolerances,
) -> Result<Vec<T>> {
    FlowField::new(n, mode, *tol)?.eval(k)
}

/// Conservation monitors at one recorded time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monitor<T> {
    pub t: T,
    pub energy: T,
    pub mean: T,
    pub closure_defect: T,
    pub sup: T,
}

impl<T: Real> Monitor<T> {
    pub fn of(t: T, k: &CurvatureField<T>) -> Self {
        Self {
            t,
            energy: energy(k),
            mean: k.mean(),
            closure_defect: closure_defect(k),
            sup: k.sup(),
        }
    }
}

/// Recorded states and monitors of one run.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<CurvatureField<T>>,
    pub monitors: Vec<Monitor<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> &CurvatureField<T> {
        self.states.last().expect("trajectory has an initial state")
    }

    /// `max_t |E(t) − E(0)| / E(0)`.
    pub fn energy_drift(&self) -> T {
        let e0 = self.monitors[0].energy;
        self.monitors
            .iter()
            .fold(T::zero(), |m, r| m.max((r.energy - e0).abs() / e0.abs().max(T::min_positive_value())))
    }

    /// `max_t |mean k(t) − mean k(0)|`.
    pub fn mean_drift(&self) -> T {
        let m0 = self.monitors[0].mean;
        self.monitors
            .iter()
            .fold(T::zero(), |m, r| m.max((r.mean - m0).abs()))
    }

    pub fn max_closure_defect(&self) -> T {
        self.monitors
            .iter()
            .fold(T::zero(), |m, r| m.max(r.closure_defect))
    }
}

/// Integration settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegrateOptions {
    pub mode: RhsMode,
    pub scheme: Scheme,
    /// Record a state every this many steps (the final state is always kept).
    pub record_every: usize,
    pub blowup_factor: f64,
    /// Steps between Jacobian refreshes for the implicit scheme.
    pub jacobian_refresh: usize,
    pub tol: Tolerances,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            mode: RhsMode::Iterated,
            scheme: Scheme::IfRk4,
            record_every: 100,
            blowup_factor: 10.0,
            jacobian_refresh: 50,
            tol: Tolerances::default(),
        }
    }
}

pub(crate) fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() || !t_end.is_finite() || t_end < dt * (1.0 - 1e-12) {
        return Err(Error::InvalidInput(format!(
            "need dt > 0 and T >= dt, got dt = {dt}, T = {t_end}"
        )));
    }
    Ok(((t_end / dt) - 1e-9).ceil().max(1.0) as usize)
}

pub(crate) fn blowup_check<T: Real>(
    k: &CurvatureField<T>,
    limit: T,
    t: T,
) -> Result<()> {
    let sup = k.sup();
    if !sup.is_finite() || k.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::Instability {
            time: to_f64(t),
            reason: "non-finite curvature".into(),
        });
    }
    if sup > limit {
        return Err(Error::Instability {
            time: to_f64(t),
            reason: format!("sup |k| = {sup} exceeds blow-up bound {limit}"),
        });
    }
    Ok(())
}

/// Integrates `∂_t k = K_n(k)` from `k0` up to time `t_end` with step `dt`.
pub fn integrate<T: Real>(
    k0: &CurvatureField<T>,
    n: usize,
    t_end: f64,
    dt: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory<T>> {
    let steps = step_count(t_end, dt)?;
    let field = FlowField::new(n, opts.mode, opts.tol)?;
    let limit = k0.sup().max(T::one()) * lit(opts.blowup_factor);
    let record_every = opts.record_every.max(1);
    let mut stepper = stepper::Stepper::new(&field, k0, opts)?;

    let mut traj = Trajectory {
        times: vec![T::zero()],
        states: vec![k0.clone()],
        monitors: vec![Monitor::of(T::zero(), k0)],
    };
    let mut t = 0.0f64;
    let mut k = k0.clone();
    for step in 1..=steps {
        let h = if step == steps { t_end - t } else { dt };
        k = stepper.step(&k, lit(h))?;
        t = if step == steps { t_end } else { step as f64 * dt };
        let tt: T = lit(t);
        blowup_check(&k, limit, tt)?;
        if step % record_every == 0 || step == steps {
            traj.times.push(tt);
            traj.monitors.push(Monitor::of(tt, &k));
            traj.states.push(k.clone());
        }
    }
    Ok(traj)
}
