//! Closed unit-speed plane loops, their curvature, winding number, bending
//! energy and the projective (Tjurin) coefficient identities.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, sup_norm, sup_norm_c, to_f64, Real};
use crate::spectral::Grid;

/// Numerical tolerances shared by the geometric and deformation routines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub unit: f64,
    pub mean: f64,
    pub wind: f64,
    pub identity: f64,
    pub k_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unit: 1e-8,
            mean: 1e-10,
            wind: 1e-8,
            identity: 1e-7,
            k_floor: 1e-6,
        }
    }
}

/// Real curvature samples on a [`Grid`] with cached spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureField<T: Real> {
    grid: Grid<T>,
    values: Vec<T>,
    spec: Vec<Complex<T>>,
}

impl<T: Real> CurvatureField<T> {
    /// Wraps samples, rejecting content above the 2/3 band. Out-of-band
    /// residue and modes at the roundoff floor are dropped.
    pub fn new(grid: &Grid<T>, values: Vec<T>) -> Result<Self> {
        grid.check_len(values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite curvature sample".into()));
        }
        let spec = grid.forward(&values);
        let scale = spec.iter().fold(T::one(), |m, c| m.max(c.norm()));
        let out = grid.out_of_band(&spec);
        if out > T::epsilon().sqrt() * lit(1e-2) * scale {
            return Err(Error::BandLimit {
                amplitude: to_f64(out),
            });
        }
        Ok(Self::settled(grid, spec))
    }

    /// Dealiases arbitrary samples onto the retained band.
    pub fn project(grid: &Grid<T>, values: &[T]) -> Result<Self> {
        grid.check_len(values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite curvature sample".into()));
        }
        Ok(Self::settled(grid, grid.forward(values)))
    }

    fn settled(grid: &Grid<T>, mut spec: Vec<Complex<T>>) -> Self {
        grid.dealias_spec(&mut spec);
        grid.drop_roundoff(&mut spec);
        Self::from_spectrum(grid, spec)
    }

    /// Builds a field from an already band-limited spectrum, keeping only
    /// its conjugate-symmetric (real) part.
    pub(crate) fn from_spectrum(grid: &Grid<T>, mut spec: Vec<Complex<T>>) -> Self {
        let n = spec.len();
        let half: T = lit(0.5);
        spec[0].im = T::zero();
        for m in 1..=n / 2 {
            let c = (spec[m] + spec[n - m].conj()) * half;
            spec[m] = c;
            spec[n - m] = c.conj();
        }
        Self {
            grid: grid.clone(),
            values: grid.inverse(&spec),
            spec,
        }
    }

    pub fn from_fn(grid: &Grid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(grid, grid.sample(f))
    }

    /// `k(s) = mean + Σ_j cos[j]·cos((j+1)s) + sin[j]·sin((j+1)s)`.
    pub fn from_fourier(grid: &Grid<T>, mean: T, cos: &[T], sin: &[T]) -> Result<Self> {
        let top = cos.len().max(sin.len());
        if top > grid.band() {
            return Err(Error::BandLimit {
                amplitude: to_f64(
                    cos.iter()
                        .chain(sin)
                        .skip(grid.band())
                        .fold(T::zero(), |m, c| m.max(c.abs())),
                ),
            });
        }
        Self::from_fn(grid, |s| {
            let mut v = mean;
            for (j, c) in cos.iter().enumerate() {
                v += *c * (lit::<T>((j + 1) as f64) * s).cos();
            }
            for (j, c) in sin.iter().enumerate() {
                v += *c * (lit::<T>((j + 1) as f64) * s).sin();
            }
            v
        })
    }

    pub fn constant(grid: &Grid<T>, c: T) -> Self {
        Self::new(grid, vec![c; grid.len()]).expect("constant is band-limited")
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn spectrum(&self) -> &[Complex<T>] {
        &self.spec
    }

    pub fn mean(&self) -> T {
        self.spec[0].re
    }

    pub fn sup(&self) -> T {
        sup_norm(&self.values)
    }

    /// `∂_s^order k`, exact for the band-limited field.
    pub fn derivative(&self, order: u32) -> Vec<T> {
        self.grid
            .inverse(&self.grid.derivative_spec(&self.spec, order))
    }

    /// `[k, k_s, …, ∂_s^max k]`, the table consumed by `DiffPoly::evaluate`.
    pub fn jets(&self, max: usize) -> Vec<Vec<T>> {
        (0..=max as u32).map(|j| self.derivative(j)).collect()
    }

    /// `k(· + s0)`.
    pub fn shifted(&self, s0: T) -> Self {
        let spec = self.grid.shift_spec(&self.spec, s0);
        Self {
            grid: self.grid.clone(),
            values: self.grid.inverse(&spec),
            spec,
        }
    }

    /// Min of `|k|` over the grid.
    pub fn min_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::infinity(), |m, v| m.min(v.abs()))
    }
}

/// Unit-speed sampled curve `Z(s_i)` with its frame data.
#[derive(Clone, Debug, PartialEq)]
pub struct Immersion<T: Real> {
    grid: Grid<T>,
    pub z: Vec<Complex<T>>,
    pub phi0: T,
    pub z0: Complex<T>,
}

impl<T: Real> Immersion<T> {
    /// Wraps samples, reading the frame off `Z(0)` and `arg Z′(0)`.
    pub fn from_samples(grid: &Grid<T>, z: Vec<Complex<T>>) -> Result<Self> {
        grid.check_len(z.len())?;
        let dz = grid.derivative_c(&z, 1);
        Ok(Self {
            grid: grid.clone(),
            phi0: dz[0].arg(),
            z0: z[0],
            z,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// Spectrum of `Z` with roundoff-level amplitudes zeroed.
    fn clean_spectrum(&self) -> Vec<Complex<T>> {
        let mut spec = self.grid.forward_c(&self.z);
        self.grid.drop_roundoff(&mut spec);
        spec
    }

    /// `∂_s^order Z`.
    pub fn derivative(&self, order: u32) -> Vec<Complex<T>> {
        let spec = self.clean_spectrum();
        self.grid.inverse_c(&self.grid.derivative_spec(&spec, order))
    }

    /// `max_i ||Z′(s_i)| − 1|`.
    pub fn speed_deviation(&self) -> T {
        self.derivative(1)
            .iter()
            .fold(T::zero(), |m, d| m.max((d.norm() - T::one()).abs()))
    }

    fn require_unit_speed(&self, tol: &Tolerances) -> Result<()> {
        let dev = self.speed_deviation();
        if dev.is_finite() && to_f64(dev) <= tol.unit {
            Ok(())
        } else {
            Err(Error::NotUnitSpeed {
                deviation: to_f64(dev),
                tol: tol.unit,
            })
        }
    }

    /// `e^{iθ} Z + c`.
    pub fn transformed(&self, theta: T, shift: Complex<T>) -> Self {
        let rot = Complex::from_polar(T::one(), theta);
        Self {
            grid: self.grid.clone(),
            z: self.z.iter().map(|&p| rot * p + shift).collect(),
            phi0: self.phi0 + theta,
            z0: rot * self.z0 + shift,
        }
    }

    /// `Z(· + s0)` for a closed loop.
    pub fn reparametrized(&self, s0: T) -> Self {
        let spec = self.grid.forward_c(&self.z);
        let z = self.grid.inverse_c(&self.grid.shift_spec(&spec, s0));
        Self::from_samples(&self.grid, z).expect("same grid")
    }

    /// Normalized Taylor coefficients `a_1, …, a_order` of
    /// `(Z(s) − Z(0))/Z′(0) = s + a_1 s² + a_2 s³ + …`.
    pub fn taylor_coefficients(&self, order: usize) -> Vec<Complex<T>> {
        let spec = self.clean_spectrum();
        let at_zero = |j: u32| {
            self.grid
                .derivative_spec(&spec, j)
                .into_iter()
                .fold(Complex::new(T::zero(), T::zero()), |a, c| a + c)
        };
        let d1 = at_zero(1);
        let mut fact = T::one();
        (1..=order)
            .map(|j| {
                fact *= lit::<T>((j + 1) as f64);
                at_zero(j as u32 + 1) / (d1 * fact)
            })
            .collect()
    }
}

/// `k = (1/i)·Z″/Z′`.
pub fn curvature_of<T: Real>(z: &Immersion<T>, tol: &Tolerances) -> Result<CurvatureField<T>> {
    z.require_unit_speed(tol)?;
    let d1 = z.derivative(1);
    let d2 = z.derivative(2);
    let ratio: Vec<Complex<T>> = d2.iter().zip(&d1).map(|(a, b)| *a / *b).collect();
    let residue = ratio.iter().fold(T::zero(), |m, r| m.max(r.re.abs()));
    if to_f64(residue) > tol.unit * (1.0 + to_f64(sup_norm_c(&ratio))) {
        return Err(Error::NotUnitSpeed {
            deviation: to_f64(residue),
            tol: tol.unit,
        });
    }
    let k: Vec<T> = ratio.iter().map(|r| r.im).collect();
    CurvatureField::project(z.grid(), &k)
}

/// Winding number `(1/2π)∮k ds`, which must be within `tol.wind` of an
/// integer.
pub fn winding<T: Real>(k: &CurvatureField<T>, tol: &Tolerances) -> Result<i64> {
    let w = to_f64(k.mean());
    let r = w.round();
    if (w - r).abs() > tol.wind || !w.is_finite() {
        return Err(Error::NonIntegerWinding {
            mean: w,
            tol: tol.wind,
        });
    }
    Ok(r as i64)
}

/// Reconstructs the loop with tangent angle `φ = φ₀ + W s + ∂_s⁻¹(k − W)`
/// starting at `Z0`; also returns the closure defect `|∮e^{iφ} ds|`.
pub fn immersion_of<T: Real>(
    k: &CurvatureField<T>,
    phi0: T,
    z0: Complex<T>,
    tol: &Tolerances,
) -> Result<(Immersion<T>, T)> {
    let w = winding(k, tol)?;
    let grid = k.grid();
    let psi = grid.inverse(&grid.antiderivative_spec(k.spectrum()));
    let wt: T = lit(w as f64);
    let tangent: Vec<Complex<T>> = grid
        .nodes()
        .iter()
        .zip(&psi)
        .map(|(&s, &p)| Complex::from_polar(T::one(), phi0 + wt * s + p - psi[0]))
        .collect();
    let (z, defect) = integrate_tangent(grid, &tangent, z0);
    Ok((
        Immersion {
            grid: grid.clone(),
            z,
            phi0,
            z0,
        },
        defect,
    ))
}

/// `Z(s) = Z0 + ∫_0^s g`, with the secular part `c_0 s` added exactly;
/// returns the samples and `2π|c_0|`.
pub(crate) fn integrate_tangent<T: Real>(
    grid: &Grid<T>,
    tangent: &[Complex<T>],
    z0: Complex<T>,
) -> (Vec<Complex<T>>, T) {
    let spec = grid.forward_c(tangent);
    let c0 = spec[0];
    let anti = grid.inverse_c(&grid.antiderivative_spec(&spec));
    let nodes = grid.nodes();
    let z = anti
        .iter()
        .zip(&nodes)
        .map(|(a, &s)| z0 + *a - anti[0] + c0 * s)
        .collect();
    (z, c0.norm() * T::TAU())
}

/// Closure defect `|∮e^{iφ} ds|` of the tangent angle built from `k`, with
/// the winding taken as the nearest integer to `mean(k)`.
pub fn closure_defect<T: Real>(k: &CurvatureField<T>) -> T {
    let grid = k.grid();
    let psi = grid.inverse(&grid.antiderivative_spec(k.spectrum()));
    let w: T = k.mean().round();
    let tangent: Vec<Complex<T>> = grid
        .nodes()
        .iter()
        .zip(&psi)
        .map(|(&s, &p)| Complex::from_polar(T::one(), w * s + p))
        .collect();
    grid.forward_c(&tangent)[0].norm() * T::TAU()
}

/// Bending energy `½∮k² ds`, by Parseval.
pub fn energy<T: Real>(k: &CurvatureField<T>) -> T {
    let msq: T = k.spectrum().iter().map(|c| c.norm_sqr()).sum();
    msq * T::PI()
}

/// Sup-norm residuals of the third and fourth projective coefficient
/// identities of a unit-speed loop.
pub fn tjurin_identity_residuals<T: Real>(
    z: &Immersion<T>,
    tol: &Tolerances,
) -> Result<(T, T)> {
    let k = curvature_of(z, tol)?;
    let dk = k.derivative(1);
    let d1 = z.derivative(1);
    let d2 = z.derivative(2);
    let d3 = z.derivative(3);
    let i = Complex::new(T::zero(), T::one());
    let quarter: T = lit(0.25);
    let half: T = lit(0.5);
    let (mut r3, mut r4) = (T::zero(), T::zero());
    for idx in 0..d1.len() {
        let a = d2[idx] / d1[idx];
        let b = d3[idx] / d1[idx];
        let kk = k.values()[idx];
        let ks = dk[idx];
        let e3 = b - a * a * lit::<T>(0.75) + (Complex::from(quarter * kk * kk) - i * ks);
        let e4 = (b - a * a * lit::<T>(1.5)) * half
            - (Complex::from(quarter * kk * kk) + i * (half * ks));
        r3 = r3.max(e3.norm());
        r4 = r4.max(e4.norm());
    }
    Ok((r3, r4))
}
