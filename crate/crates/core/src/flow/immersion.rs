use num_complex::Complex;

use super::stepper::{apply, axpy, Lawson};
use super::{blowup_check, step_count, FlowField, IntegrateOptions, Monitor, RhsMode, Trajectory};
use crate::deform::ell_r0;
use crate::error::{Error, Result};
use crate::loopgeom::{curvature_of, integrate_tangent, CurvatureField, Immersion};
use crate::scalar::{lit, sup_diff, to_f64, Real};

/// Output of [`evolve_immersion`].
#[derive(Clone, Debug)]
pub struct ImmersionRun<T: Real> {
    /// Loop snapshots at the recorded times of `curvature`.
    pub snapshots: Vec<Immersion<T>>,
    pub curvature: Trajectory<T>,
    /// `sup |curvature_of(Z(T)) − k(T)|`.
    pub consistency: T,
    /// Largest `max_s ||∂_s Z| − 1|` seen before each unit-speed projection.
    pub max_unit_drift: T,
    /// Largest `|∮ ∂_s Z ds|` after projection.
    pub max_closure_defect: T,
}

/// Co-evolves the loop by `∂_t Z = v ∂_s Z`, `v = ℓ(K_{n−1}(k))`, together
/// with its curvature under `∂_t k = K_n(k)`.
pub fn evolve_immersion<T: Real>(
    z0: &Immersion<T>,
    n: usize,
    t_end: f64,
    dt: f64,
    opts: &IntegrateOptions,
) -> Result<ImmersionRun<T>> {
    let tol = opts.tol;
    let k0 = curvature_of(z0, &tol)?;
    if n == 1 {
        return shift_flow(z0, &k0, t_end, dt, opts);
    }
    let steps = step_count(t_end, dt)?;
    let grid = k0.grid().clone();
    let fk = FlowField::new(n, opts.mode, tol)?;
    let fv = FlowField::new(n - 1, opts.mode, tol)?;
    let beta = fk.beta(&k0);
    let symbol = fk.linear_symbol(&grid, &beta, k0.mean());
    let mut lawson = Lawson::new(symbol.clone());
    let limit = k0.sup().max(T::one()) * lit(opts.blowup_factor);
    let record_every = opts.record_every.max(1);

    let velocity = |u: &[Complex<T>], z: &[Complex<T>]| -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
        let k = CurvatureField::from_spectrum(&grid, u.to_vec());
        let mut fspec = grid.forward(&fk.eval(&k)?);
        grid.dealias_spec(&mut fspec);
        let nk: Vec<Complex<T>> = fspec
            .iter()
            .zip(k.spectrum())
            .zip(&symbol)
            .map(|((f, uv), l)| *f - *l * *uv)
            .collect();
        let vi = fv.eval(&k)?;
        let mut vr = ell_r0(&k, &vi, &tol)?;
        if opts.mode == RhsMode::Literal {
            let shift = fk.literal_gauge_shift(&k);
            vr.iter_mut().for_each(|x| *x += shift);
        }
        let dz = grid.derivative_c(z, 1);
        let zt = (0..grid.len())
            .map(|i| Complex::new(vr[i], vi[i]) * dz[i])
            .collect();
        Ok((nk, zt))
    };

    let mut snapshots = vec![z0.clone()];
    let mut traj = Trajectory {
        times: vec![T::zero()],
        states: vec![k0.clone()],
        monitors: vec![Monitor::of(T::zero(), &k0)],
    };
    let mut u = k0.spectrum().to_vec();
    let mut z = z0.z.clone();
    let mut max_drift = z0.speed_deviation();
    let mut max_defect = T::zero();
    let mut t = 0.0f64;
    let mut k = k0.clone();
    for step in 1..=steps {
        let hf = if step == steps { t_end - t } else { dt };
        let h: T = lit(hf);
        let half = h * lit(0.5);
        let (eh, ef) = {
            let (a, b) = lawson.factors(h);
            (a.to_vec(), b.to_vec())
        };
        let (a1, b1) = velocity(&u, &z)?;
        let (a2, b2) = velocity(&apply(&eh, &axpy(&u, half, &a1)), &axpy(&z, half, &b1))?;
        let (a3, b3) = velocity(&axpy(&apply(&eh, &u), half, &a2), &axpy(&z, half, &b2))?;
        let (a4, b4) = velocity(&axpy(&apply(&ef, &u), h, &apply(&eh, &a3)), &axpy(&z, h, &b3))?;
        let sixth = h / lit(6.0);
        let two: T = lit(2.0);
        for i in 0..u.len() {
            u[i] = ef[i] * u[i] + (ef[i] * a1[i] + eh[i] * (a2[i] + a3[i]) * two + a4[i]) * sixth;
            z[i] = z[i] + (b1[i] + (b2[i] + b3[i]) * two + b4[i]) * sixth;
        }
        grid.dealias_spec(&mut u);

        let dz = grid.derivative_c(&z, 1);
        let drift = dz
            .iter()
            .fold(T::zero(), |m, d| m.max((d.norm() - T::one()).abs()));
        max_drift = max_drift.max(drift);
        t = if step == steps { t_end } else { step as f64 * dt };
        if to_f64(drift) > 10.0 * tol.unit {
            return Err(Error::NotUnitSpeed {
                deviation: to_f64(drift),
                tol: 10.0 * tol.unit,
            });
        }
        let tangent: Vec<Complex<T>> = dz.iter().map(|d| *d / d.norm()).collect();
        let (zn, defect) = integrate_tangent(&grid, &tangent, z[0]);
        z = zn;
        max_defect = max_defect.max(defect);

        k = CurvatureField::from_spectrum(&grid, u.clone());
        let tt: T = lit(t);
        blowup_check(&k, limit, tt)?;
        if step % record_every == 0 || step == steps {
            traj.times.push(tt);
            traj.monitors.push(Monitor::of(tt, &k));
            traj.states.push(k.clone());
            snapshots.push(Immersion::from_samples(&grid, z.clone())?);
        }
    }
    let last = snapshots.last().expect("initial snapshot");
    let consistency = sup_diff(curvature_of(last, &tol)?.values(), k.values());
    Ok(ImmersionRun {
        snapshots,
        curvature: traj,
        consistency,
        max_unit_drift: max_drift,
        max_closure_defect: max_defect,
    })
}

/// The stationary flow: `Z(s, t) = Z(s + t)`.
fn shift_flow<T: Real>(
    z0: &Immersion<T>,
    k0: &CurvatureField<T>,
    t_end: f64,
    dt: f64,
    opts: &IntegrateOptions,
) -> Result<ImmersionRun<T>> {
    let steps = step_count(t_end, dt)?;
    let record_every = opts.record_every.max(1);
    let mut run = ImmersionRun {
        snapshots: vec![z0.clone()],
        curvature: Trajectory {
            times: vec![T::zero()],
            states: vec![k0.clone()],
            monitors: vec![Monitor::of(T::zero(), k0)],
        },
        consistency: T::zero(),
        max_unit_drift: z0.speed_deviation(),
        max_closure_defect: T::zero(),
    };
    for step in (1..=steps).filter(|s| s % record_every == 0 || *s == steps) {
        let t = if step == steps { t_end } else { step as f64 * dt };
        let tt: T = lit(t);
        let k = k0.shifted(tt);
        run.curvature.times.push(tt);
        run.curvature.monitors.push(Monitor::of(tt, &k));
        run.curvature.states.push(k);
        run.snapshots.push(z0.reparametrized(tt));
    }
    let last = run.snapshots.last().expect("initial snapshot");
    run.consistency = sup_diff(
        curvature_of(last, &opts.tol)?.values(),
        run.curvature.final_state().values(),
    );
    Ok(run)
}
