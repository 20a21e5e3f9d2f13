use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use super::{FlowField, IntegrateOptions, Scheme};
use crate::error::{Error, Result};
use crate::loopgeom::CurvatureField;
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::Grid;

type Spec<T> = Vec<Complex<T>>;

/// Lawson integrating-factor RK4 on spectra. The linear part `L` is
/// diagonal; `nonlinear` must return `F(u) − L u`.
pub(crate) struct Lawson<T: Real> {
    symbol: Vec<Complex<T>>,
    cached_h: Option<T>,
    half: Spec<T>,
    full: Spec<T>,
}

impl<T: Real> Lawson<T> {
    pub(crate) fn new(symbol: Vec<Complex<T>>) -> Self {
        Self {
            symbol,
            cached_h: None,
            half: Vec::new(),
            full: Vec::new(),
        }
    }

    pub(crate) fn symbol(&self) -> &[Complex<T>] {
        &self.symbol
    }

    pub(crate) fn factors(&mut self, h: T) -> (&[Complex<T>], &[Complex<T>]) {
        if self.cached_h != Some(h) {
            let half_h = h * lit(0.5);
            self.half = self.symbol.iter().map(|l| (*l * half_h).exp()).collect();
            self.full = self.symbol.iter().map(|l| (*l * h).exp()).collect();
            self.cached_h = Some(h);
        }
        (&self.half, &self.full)
    }
}

pub(crate) fn apply<T: Real>(e: &[Complex<T>], u: &[Complex<T>]) -> Spec<T> {
    e.iter().zip(u).map(|(a, b)| *a * *b).collect()
}

pub(crate) fn axpy<T: Real>(u: &[Complex<T>], h: T, v: &[Complex<T>]) -> Spec<T> {
    u.iter().zip(v).map(|(a, b)| *a + *b * h).collect()
}

pub(crate) enum Stepper<'a, T: Real> {
    IfRk4 {
        field: &'a FlowField,
        grid: Grid<T>,
        lawson: Lawson<T>,
    },
    Gl4(Box<Gl4<'a, T>>),
}

impl<'a, T: Real> Stepper<'a, T> {
    pub(crate) fn new(
        field: &'a FlowField,
        k0: &CurvatureField<T>,
        opts: &IntegrateOptions,
    ) -> Result<Self> {
        let grid = k0.grid().clone();
        match opts.scheme {
            Scheme::IfRk4 => {
                let beta = field.beta(k0);
                let symbol = field.linear_symbol(&grid, &beta, k0.mean());
                Ok(Self::IfRk4 {
                    field,
                    grid,
                    lawson: Lawson::new(symbol),
                })
            }
            Scheme::GaussLegendre4 => Ok(Self::Gl4(Box::new(Gl4::new(
                field,
                grid,
                opts.jacobian_refresh.max(1),
            )))),
        }
    }

    pub(crate) fn step(&mut self, k: &CurvatureField<T>, h: T) -> Result<CurvatureField<T>> {
        match self {
            Self::IfRk4 {
                field,
                grid,
                lawson,
            } => {
                let symbol = lawson.symbol().to_vec();
                let nonlinear = |u: &[Complex<T>]| -> Result<Spec<T>> {
                    let kf = CurvatureField::from_spectrum(grid, u.to_vec());
                    let f = field.eval(&kf)?;
                    let mut spec = grid.forward(&f);
                    grid.dealias_spec(&mut spec);
                    Ok(spec
                        .iter()
                        .zip(kf.spectrum())
                        .zip(&symbol)
                        .map(|((fv, uv), l)| *fv - *l * *uv)
                        .collect())
                };
                let u = k.spectrum();
                let (eh, ef) = lawson.factors(h);
                let half: T = lit(0.5);
                let k1 = nonlinear(u)?;
                let k2 = nonlinear(&apply(eh, &axpy(u, h * half, &k1)))?;
                let k3 = nonlinear(&axpy(&apply(eh, u), h * half, &k2))?;
                let k4 = nonlinear(&axpy(&apply(ef, u), h, &apply(eh, &k3)))?;
                let sixth = h / lit(6.0);
                let two: T = lit(2.0);
                let mut next: Spec<T> = (0..u.len())
                    .map(|i| {
                        ef[i] * u[i]
                            + (ef[i] * k1[i] + eh[i] * (k2[i] + k3[i]) * two + k4[i]) * sixth
                    })
                    .collect();
                grid.dealias_spec(&mut next);
                Ok(CurvatureField::from_spectrum(grid, next))
            }
            Self::Gl4(gl) => gl.step(k, h),
        }
    }
}

/// Real coordinates of a band-limited spectrum:
/// `[c_0.re, c_1.re, c_1.im, …, c_M.re, c_M.im]`.
pub(crate) fn to_band<T: Real>(grid: &Grid<T>, spec: &[Complex<T>]) -> Vec<f64> {
    let m = grid.band();
    let mut out = Vec::with_capacity(2 * m + 1);
    out.push(to_f64(spec[0].re));
    for c in &spec[1..=m] {
        out.push(to_f64(c.re));
        out.push(to_f64(c.im));
    }
    out
}

pub(crate) fn from_band<T: Real>(grid: &Grid<T>, y: &[f64]) -> Spec<T> {
    let n = grid.len();
    let m = grid.band();
    let mut spec = vec![Complex::new(T::zero(), T::zero()); n];
    spec[0] = Complex::new(lit(y[0]), T::zero());
    for j in 1..=m {
        let c = Complex::new(lit(y[2 * j - 1]), lit(y[2 * j]));
        spec[j] = c;
        spec[n - j] = c.conj();
    }
    spec
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Two-stage Gauss–Legendre collocation with a frozen Jacobian.
pub(crate) struct Gl4<'a, T: Real> {
    field: &'a FlowField,
    grid: Grid<T>,
    refresh: usize,
    since_refresh: usize,
    lu: Option<(f64, nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>)>,
}

impl<'a, T: Real> Gl4<'a, T> {
    fn new(field: &'a FlowField, grid: Grid<T>, refresh: usize) -> Self {
        Self {
            field,
            grid,
            refresh,
            since_refresh: 0,
            lu: None,
        }
    }

    fn rhs_band(&self, y: &[f64]) -> Result<Vec<f64>> {
        let k = CurvatureField::from_spectrum(&self.grid, from_band(&self.grid, y));
        let f = self.field.eval(&k)?;
        Ok(to_band(&self.grid, &self.grid.forward(&f)))
    }

    fn jacobian(&self, k: &CurvatureField<T>) -> DMatrix<f64> {
        let beta = self.field.beta(k);
        let profiles = self.field.partial_profiles(k, &beta);
        let dim = 2 * self.grid.band() + 1;
        let mut jac = DMatrix::<f64>::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        for col in 0..dim {
            e.fill(0.0);
            e[col] = 1.0;
            let spec = from_band::<T>(&self.grid, &e);
            let mut out = vec![T::zero(); self.grid.len()];
            for (i, prof) in &profiles {
                let d = self.grid.inverse(&self.grid.derivative_spec(&spec, *i as u32));
                for ((o, p), dv) in out.iter_mut().zip(prof).zip(&d) {
                    *o += *p * *dv;
                }
            }
            let mut s = self.grid.forward(&out);
            self.grid.dealias_spec(&mut s);
            for (row, v) in to_band(&self.grid, &s).into_iter().enumerate() {
                jac[(row, col)] = v;
            }
        }
        jac
    }

    fn factor(&mut self, k: &CurvatureField<T>, h: f64) -> Result<()> {
        let jac = self.jacobian(k);
        let dim = jac.nrows();
        let a = [
            [0.25, 0.25 - SQRT3 / 6.0],
            [0.25 + SQRT3 / 6.0, 0.25],
        ];
        let mut m = DMatrix::<f64>::identity(2 * dim, 2 * dim);
        for bi in 0..2 {
            for bj in 0..2 {
                let c = -h * a[bi][bj];
                let mut block = m.view_mut((bi * dim, bj * dim), (dim, dim));
                block += &jac * c;
            }
        }
        self.lu = Some((h, m.lu()));
        self.since_refresh = 0;
        Ok(())
    }

    fn newton(&self, y: &[f64], h: f64) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        let (_, lu) = self.lu.as_ref().expect("factored");
        let dim = y.len();
        let a = [
            [0.25, 0.25 - SQRT3 / 6.0],
            [0.25 + SQRT3 / 6.0, 0.25],
        ];
        let f0 = self.rhs_band(y)?;
        let c = [0.5 - SQRT3 / 6.0, 0.5 + SQRT3 / 6.0];
        let mut z1: Vec<f64> = f0.iter().map(|f| h * c[0] * f).collect();
        let mut z2: Vec<f64> = f0.iter().map(|f| h * c[1] * f).collect();
        let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut prev = f64::INFINITY;
        for _ in 0..12 {
            let y1: Vec<f64> = y.iter().zip(&z1).map(|(a, b)| a + b).collect();
            let y2: Vec<f64> = y.iter().zip(&z2).map(|(a, b)| a + b).collect();
            let f1 = self.rhs_band(&y1)?;
            let f2 = self.rhs_band(&y2)?;
            let mut g = DVector::<f64>::zeros(2 * dim);
            for i in 0..dim {
                g[i] = -(z1[i] - h * (a[0][0] * f1[i] + a[0][1] * f2[i]));
                g[dim + i] = -(z2[i] - h * (a[1][0] * f1[i] + a[1][1] * f2[i]));
            }
            let dz = lu
                .solve(&g)
                .ok_or_else(|| Error::NotInvertible("collocation Newton matrix".into()))?;
            let mut norm = 0.0f64;
            for i in 0..dim {
                z1[i] += dz[i];
                z2[i] += dz[dim + i];
                norm = norm.max(dz[i].abs()).max(dz[dim + i].abs());
            }
            if !norm.is_finite() {
                return Ok(None);
            }
            if norm <= 1e-13 * scale || (norm <= 1e-10 * scale && norm > 0.5 * prev) {
                return Ok(Some((z1, z2)));
            }
            if norm > prev && prev.is_finite() && norm > 1e-6 * scale {
                return Ok(None);
            }
            prev = norm;
        }
        Ok(None)
    }

    fn step(&mut self, k: &CurvatureField<T>, h: T) -> Result<CurvatureField<T>> {
        let hf = to_f64(h);
        let stale = match &self.lu {
            None => true,
            Some((h0, _)) => *h0 != hf || self.since_refresh >= self.refresh,
        };
        if stale {
            self.factor(k, hf)?;
        }
        let y = to_band(&self.grid, k.spectrum());
        let mut sol = self.newton(&y, hf)?;
        if sol.is_none() && self.since_refresh > 0 {
            self.factor(k, hf)?;
            sol = self.newton(&y, hf)?;
        }
        let Some((z1, z2)) = sol else {
            return Err(Error::NoConvergence {
                iterations: 12,
                residual: f64::NAN,
            });
        };
        self.since_refresh += 1;
        let next: Vec<f64> = (0..y.len())
            .map(|i| y[i] + SQRT3 * (z2[i] - z1[i]))
            .collect();
        Ok(CurvatureField::from_spectrum(
            &self.grid,
            from_band(&self.grid, &next),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_round_trip() {
        let g = Grid::<f64>::new(32).unwrap();
        let k = CurvatureField::from_fourier(&g, 1.0, &[0.2, 0.0, 0.1], &[0.3]).unwrap();
        let y = to_band(&g, k.spectrum());
        assert_eq!(y.len(), 2 * g.band() + 1);
        let back = from_band::<f64>(&g, &y);
        for (a, b) in back.iter().zip(k.spectrum()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn lawson_factors_are_unitary_for_dispersive_symbols() {
        let sym: Vec<Complex<f64>> = (0..8).map(|m| Complex::new(0.0, (m * m * m) as f64)).collect();
        let mut l = Lawson::new(sym);
        let (half, full) = l.factors(0.1);
        for (a, b) in half.iter().zip(full) {
            assert!((a.norm() - 1.0).abs() < 1e-14);
            assert!((a * a - b).norm() < 1e-13);
        }
    }
}
