//! Uniform periodic grid on `[0, 2π)` with FFT-based calculus.
//!
//! Spectra are normalized so that `f(s) = Σ_m c_m e^{ims}`; `c_0` is the
//! mean. Products are dealiased with the 2/3 rule: only modes with
//! `|m| ≤ N/3` survive.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{lit, sup_norm, sup_norm_c, to_f64, Real};

#[derive(Clone)]
pub struct Grid<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n).finish()
    }
}

impl<T: Real> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl<T: Real> Grid<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "grid size {n} must be a power of two and at least 16"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Highest retained wavenumber under the 2/3 rule.
    pub fn band(&self) -> usize {
        self.n / 3
    }

    pub fn spacing(&self) -> T {
        T::TAU() / lit(self.n as f64)
    }

    pub fn nodes(&self) -> Vec<T> {
        let h = self.spacing();
        (0..self.n).map(|i| h * lit(i as f64)).collect()
    }

    pub fn sample(&self, f: impl Fn(T) -> T) -> Vec<T> {
        self.nodes().into_iter().map(f).collect()
    }

    /// Signed wavenumber of FFT slot `idx`; the Nyquist slot maps to `N/2`.
    pub fn wavenumber(&self, idx: usize) -> i64 {
        if idx <= self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::GridMismatch(self.n, len))
        }
    }

    pub fn forward_c(&self, f: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = f.to_vec();
        self.forward.process(&mut buf);
        let scale = T::one() / lit(self.n as f64);
        for c in &mut buf {
            *c = *c * scale;
        }
        buf
    }

    pub fn inverse_c(&self, spec: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = spec.to_vec();
        self.inverse.process(&mut buf);
        buf
    }

    pub fn forward(&self, f: &[T]) -> Vec<Complex<T>> {
        let buf: Vec<Complex<T>> = f.iter().map(|&x| Complex::new(x, T::zero())).collect();
        self.forward_c(&buf)
    }

    pub fn inverse(&self, spec: &[Complex<T>]) -> Vec<T> {
        self.inverse_c(spec).into_iter().map(|c| c.re).collect()
    }

    pub fn mean(&self, f: &[T]) -> T {
        f.iter().copied().sum::<T>() / lit(self.n as f64)
    }

    /// `∮ f ds` by the trapezoidal rule, exact for band-limited `f`.
    pub fn integral(&self, f: &[T]) -> T {
        self.mean(f) * T::TAU()
    }

    fn nyquist_tol(&self) -> T {
        T::epsilon().sqrt() * lit(1e-2)
    }

    /// Largest spectral amplitude outside the retained band `|m| ≤ N/3`.
    pub fn out_of_band(&self, spec: &[Complex<T>]) -> T {
        let m = self.band() as i64;
        spec.iter()
            .enumerate()
            .filter(|(i, _)| self.wavenumber(*i).abs() > m)
            .fold(T::zero(), |acc, (_, c)| acc.max(c.norm()))
    }

    fn nyquist_check(&self, spec: &[Complex<T>]) -> Result<()> {
        let scale = spec.iter().fold(T::one(), |m, c| m.max(c.norm()));
        let amp = spec[self.n / 2].norm();
        if amp > self.nyquist_tol() * scale {
            return Err(Error::BandLimit {
                amplitude: to_f64(amp),
            });
        }
        Ok(())
    }

    fn ik_power(&self, idx: usize, order: u32) -> Complex<T> {
        let m: T = lit(self.wavenumber(idx) as f64);
        Complex::new(T::zero(), m).powi(order as i32)
    }

    /// `∂_s^order f`; rejects real inputs carrying Nyquist content.
    pub fn derivative_n(&self, f: &[T], order: u32) -> Result<Vec<T>> {
        self.check_len(f.len())?;
        let spec = self.forward(f);
        self.nyquist_check(&spec)?;
        Ok(self.inverse(&self.derivative_spec(&spec, order)))
    }

    pub fn derivative(&self, f: &[T]) -> Result<Vec<T>> {
        self.derivative_n(f, 1)
    }

    /// Multiplies a spectrum by `(im)^order`, zeroing the Nyquist slot.
    pub fn derivative_spec(&self, spec: &[Complex<T>], order: u32) -> Vec<Complex<T>> {
        spec.iter()
            .enumerate()
            .map(|(i, &c)| {
                if order > 0 && i == self.n / 2 {
                    Complex::new(T::zero(), T::zero())
                } else {
                    c * self.ik_power(i, order)
                }
            })
            .collect()
    }

    /// `∂_s^order` of a complex periodic function. The Nyquist slot is
    /// dropped since complex data need not be band-limited.
    pub fn derivative_c(&self, f: &[Complex<T>], order: u32) -> Vec<Complex<T>> {
        let spec = self.forward_c(f);
        self.inverse_c(&self.derivative_spec(&spec, order))
    }

    /// Zero-mean antiderivative of a spectrum (mode 0 and Nyquist dropped).
    pub fn antiderivative_spec(&self, spec: &[Complex<T>]) -> Vec<Complex<T>> {
        spec.iter()
            .enumerate()
            .map(|(i, &c)| {
                if i == 0 || i == self.n / 2 {
                    Complex::new(T::zero(), T::zero())
                } else {
                    c / self.ik_power(i, 1)
                }
            })
            .collect()
    }

    /// The unique zero-mean antiderivative of `f`, after checking that the
    /// mean of `f` is below `tol_mean` relative to `max(1, sup|f|)`.
    pub fn periodic_antiderivative(&self, f: &[T], tol_mean: T) -> Result<Vec<T>> {
        self.check_len(f.len())?;
        let spec = self.forward(f);
        let scale = T::one().max(sup_norm(f));
        if spec[0].re.abs() > tol_mean * scale {
            return Err(Error::NotExactNumeric {
                mean: to_f64(spec[0].re),
                tol: to_f64(tol_mean * scale),
            });
        }
        self.nyquist_check(&spec)?;
        Ok(self.inverse(&self.antiderivative_spec(&spec)))
    }

    /// Antiderivative of `f − mean(f)` without any tolerance check.
    pub fn antiderivative_of_fluctuation(&self, f: &[T]) -> Vec<T> {
        let spec = self.forward(f);
        self.inverse(&self.antiderivative_spec(&spec))
    }

    /// Zeroes coefficients at or below `64·ε·max|c|`.
    pub fn drop_roundoff(&self, spec: &mut [Complex<T>]) {
        let floor = sup_norm_c(spec) * T::epsilon() * lit(64.0);
        for c in spec.iter_mut() {
            if c.norm() <= floor {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
    }

    pub fn dealias_spec(&self, spec: &mut [Complex<T>]) {
        let m = self.band() as i64;
        for (i, c) in spec.iter_mut().enumerate() {
            if self.wavenumber(i).abs() > m {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
    }

    pub fn dealias(&self, f: &[T]) -> Vec<T> {
        let mut spec = self.forward(f);
        self.dealias_spec(&mut spec);
        self.inverse(&spec)
    }

    /// Pointwise product followed by dealiasing.
    pub fn mul(&self, a: &[T], b: &[T]) -> Vec<T> {
        let prod: Vec<T> = a.iter().zip(b).map(|(x, y)| *x * *y).collect();
        self.dealias(&prod)
    }

    /// Evaluates the trigonometric interpolant of a spectrum at `s`.
    pub fn interpolate(&self, spec: &[Complex<T>], s: T) -> Complex<T> {
        spec.iter()
            .enumerate()
            .filter(|(i, _)| *i != self.n / 2)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (i, &c)| {
                let m: T = lit(self.wavenumber(i) as f64);
                acc + c * Complex::from_polar(T::one(), m * s)
            })
    }

    /// Spectrum of `f(· + shift)`.
    pub fn shift_spec(&self, spec: &[Complex<T>], shift: T) -> Vec<Complex<T>> {
        spec.iter()
            .enumerate()
            .map(|(i, &c)| {
                if i == self.n / 2 {
                    Complex::new(T::zero(), T::zero())
                } else {
                    let m: T = lit(self.wavenumber(i) as f64);
                    c * Complex::from_polar(T::one(), m * shift)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::sup_diff;

    fn grid() -> Grid<f64> {
        Grid::new(64).unwrap()
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::<f64>::new(8).is_err());
        assert!(Grid::<f64>::new(48).is_err());
        assert_eq!(Grid::<f64>::new(256).unwrap().band(), 85);
    }

    #[test]
    fn derivative_examples() {
        let g = grid();
        let f = g.sample(|s| (2.0 * s).cos());
        let df = g.derivative(&f).unwrap();
        assert!(sup_diff(&df, &g.sample(|s| -2.0 * (2.0 * s).sin())) < 1e-13);
        assert!(sup_norm(&g.derivative(&vec![3.0; 64]).unwrap()) < 1e-14);
        let nyq = g.sample(|s| (32.0 * s).cos());
        assert!(matches!(g.derivative(&nyq), Err(Error::BandLimit { .. })));
    }

    #[test]
    fn antiderivative_examples() {
        let g = grid();
        let f = g.sample(f64::cos);
        let a = g.periodic_antiderivative(&f, 1e-10).unwrap();
        assert!(sup_diff(&a, &g.sample(f64::sin)) < 1e-13);
        assert!(matches!(
            g.periodic_antiderivative(&vec![1.0; 64], 1e-10),
            Err(Error::NotExactNumeric { .. })
        ));
    }

    #[test]
    fn antiderivative_of_k_dk() {
        let g = grid();
        let k = g.sample(|s| 1.0 + 0.5 * (2.0 * s).cos() + 0.2 * (3.0 * s).sin());
        let dk = g.derivative(&k).unwrap();
        let kdk = g.mul(&k, &dk);
        let a = g.periodic_antiderivative(&kdk, 1e-10).unwrap();
        let half_sq: Vec<f64> = k.iter().map(|x| 0.5 * x * x).collect();
        let m = g.mean(&half_sq);
        let expect: Vec<f64> = half_sq.iter().map(|x| x - m).collect();
        assert!(sup_diff(&a, &expect) < 1e-13);
    }

    #[test]
    fn dealias_keeps_band() {
        let g = grid();
        let f = g.sample(|s| (21.0 * s).cos() + (22.0 * s).sin());
        let d = g.dealias(&f);
        assert!(sup_diff(&d, &g.sample(|s| (21.0 * s).cos())) < 1e-13);
    }

    #[test]
    fn shift_and_interpolate() {
        let g = grid();
        let f = g.sample(|s| (3.0 * s).sin());
        let spec = g.forward(&f);
        let v = g.interpolate(&spec, 0.3);
        assert!((v.re - (0.9f64).sin()).abs() < 1e-13 && v.im.abs() < 1e-13);
        let shifted = g.inverse(&g.shift_spec(&spec, 0.25));
        assert!(sup_diff(&shifted, &g.sample(|s| (3.0 * (s + 0.25)).sin())) < 1e-13);
    }

    #[test]
    fn works_in_single_precision() {
        let g = Grid::<f32>::new(32).unwrap();
        let df = g.derivative(&g.sample(f32::sin)).unwrap();
        assert!(sup_diff(&df, &g.sample(f32::cos)) < 1e-5);
    }
}
