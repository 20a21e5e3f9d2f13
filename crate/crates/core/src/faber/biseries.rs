use num_rational::BigRational;
use serde_json::{json, Value};

use super::ring::Ring;
use super::series::Series;
use crate::error::{Error, Result};

/// Bivariate power series `Σ c_{a,b} xᵃ yᵇ` known for total degree
/// `a + b < prec`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<R> {
    prec: usize,
    /// `rows[a][b]` for `a + b < prec`.
    rows: Vec<Vec<R>>,
}

impl<R: Ring> BiSeries<R> {
    pub fn from_fn(prec: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let rows = (0..prec)
            .map(|a| (0..prec - a).map(|b| f(a, b)).collect())
            .collect();
        Self { prec, rows }
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_fn(prec, |_, _| R::zero())
    }

    pub fn one(prec: usize) -> Self {
        Self::from_fn(prec, |a, b| if a + b == 0 { R::one() } else { R::zero() })
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn coeff(&self, a: usize, b: usize) -> Result<R> {
        if a + b >= self.prec {
            return Err(Error::InsufficientOrder(format!(
                "bivariate coefficient ({a},{b}) requested, known for total degree < {}",
                self.prec
            )));
        }
        Ok(self.rows[a][b].clone())
    }

    fn c(&self, a: usize, b: usize) -> &R {
        &self.rows[a][b]
    }

    /// Known coefficients as `((a, b), value)`, by total degree then `a`.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &R)> {
        (0..self.prec).flat_map(move |d| (0..=d).rev().map(move |a| ((a, d - a), self.c(a, d - a))))
    }

    pub fn truncate(&self, prec: usize) -> Self {
        let p = prec.min(self.prec);
        Self::from_fn(p, |a, b| self.c(a, b).clone())
    }

    /// A univariate series in `x` (`in_x`) or `y`, as a bivariate one.
    pub fn from_series(s: &Series<R>, in_x: bool) -> Result<Self> {
        if s.start() < 0 {
            return Err(Error::InvalidInput("bivariate embedding needs a power series".into()));
        }
        let prec = s.precision().max(0) as usize;
        Ok(Self::from_fn(prec, |a, b| match (in_x, a, b) {
            (true, a, 0) => s.coeff(a as i64).unwrap_or_else(|_| R::zero()),
            (false, 0, b) => s.coeff(b as i64).unwrap_or_else(|_| R::zero()),
            _ => R::zero(),
        }))
    }

    /// `(F(x) − F(y))/(x − y) = Σ_n F_n Σ_{i+j=n−1} xⁱ yʲ`.
    pub fn difference_quotient(f: &Series<R>) -> Result<Self> {
        if f.start() < 0 {
            return Err(Error::InvalidInput("difference quotient needs a power series".into()));
        }
        let prec = (f.precision() - 1).max(0) as usize;
        Ok(Self::from_fn(prec, |a, b| {
            f.coeff((a + b + 1) as i64).unwrap_or_else(|_| R::zero())
        }))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let p = self.prec.min(rhs.prec);
        Self::from_fn(p, |a, b| self.c(a, b).add(rhs.c(a, b)))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let p = self.prec.min(rhs.prec);
        Self::from_fn(p, |a, b| self.c(a, b).sub(rhs.c(a, b)))
    }

    pub fn scale(&self, k: &R) -> Self {
        Self::from_fn(self.prec, |a, b| self.c(a, b).mul(k))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.prec.min(rhs.prec);
        Self::from_fn(p, |a, b| {
            let mut acc = R::zero();
            for i in 0..=a {
                for j in 0..=b {
                    acc = acc.add(&self.c(i, j).mul(rhs.c(a - i, b - j)));
                }
            }
            acc
        })
    }

    /// Multiplication by `xᵐ yⁿ`.
    pub fn shift(&self, m: usize, n: usize) -> Self {
        Self::from_fn(self.prec + m + n, |a, b| {
            if a >= m && b >= n {
                self.c(a - m, b - n).clone()
            } else {
                R::zero()
            }
        })
    }

    /// `∂_x F`.
    pub fn dx(&self) -> Self {
        Self::from_fn(self.prec.saturating_sub(1), |a, b| {
            self.c(a + 1, b).mul(&R::from_int(a as i64 + 1))
        })
    }

    /// `self / rhs` for `rhs(0, 0)` a unit.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        let c0 = rhs.coeff(0, 0)?;
        let inv = c0
            .inv()
            .ok_or_else(|| Error::NotInvertible(format!("{c0} is not a unit")))?;
        let p = self.prec.min(rhs.prec);
        let mut out = Self::zero(p);
        for d in 0..p {
            for a in 0..=d {
                let b = d - a;
                let mut acc = self.c(a, b).clone();
                for i in 0..=a {
                    for j in 0..=b {
                        if i + j > 0 {
                            acc = acc.sub(&rhs.c(i, j).mul(out.c(a - i, b - j)));
                        }
                    }
                }
                out.rows[a][b] = acc.mul(&inv);
            }
        }
        Ok(out)
    }

    /// `log F` for `F(0, 0)` a unit with a ring logarithm: the `y`-only
    /// part comes from the univariate log of `F(0, y)`, the rest from
    /// integrating `F_x / F` in `x`.
    pub fn log(&self) -> Result<Self> {
        let edge = Series::new(0, (0..self.prec).map(|b| self.c(0, b).clone()).collect());
        let l0 = edge.log()?;
        let g = self.dx().div(self)?;
        Ok(Self::from_fn(self.prec, |a, b| {
            if a == 0 {
                l0.coeff(b as i64).unwrap_or_else(|_| R::zero())
            } else {
                g.c(a - 1, b).mul(&R::from_rational(&BigRational::new(1.into(), (a as i64).into())))
            }
        }))
    }

    /// `exp F` for `F(0, 0) = 0`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeff(0, 0)?.is_zero() {
            return Err(Error::NotInvertible("exp needs F(0, 0) = 0".into()));
        }
        let mut out = Self::one(self.prec);
        let mut power = Self::one(self.prec);
        let mut fact = BigRational::from_integer(1.into());
        for k in 1..self.prec {
            power = power.mul(self);
            fact *= BigRational::from_integer((k as i64).into());
            out = out.add(&power.scale(&R::from_rational(&fact.recip())));
        }
        Ok(out)
    }

    /// `F(X(x), Y(y))` for univariate `X, Y` vanishing at 0.
    pub fn compose(&self, x: &Series<R>, y: &Series<R>) -> Result<Self> {
        for s in [x, y] {
            if s.valuation().unwrap_or(s.precision()) < 1 || s.start() < 0 {
                return Err(Error::InvalidInput(
                    "bivariate substitution needs series vanishing at 0".into(),
                ));
            }
        }
        let bx = Self::from_series(x, true)?;
        let by = Self::from_series(y, false)?;
        let mut xp = vec![Self::one(self.prec)];
        let mut yp = vec![Self::one(self.prec)];
        for k in 1..self.prec {
            xp.push(xp[k - 1].mul(&bx));
            yp.push(yp[k - 1].mul(&by));
        }
        let mut out = Self::zero(self.prec);
        for ((a, b), c) in self.iter() {
            if !c.is_zero() {
                out = out.add(&xp[a].mul(&yp[b]).scale(c));
            }
        }
        Ok(out)
    }

    pub fn is_symmetric(&self) -> bool {
        self.iter().all(|((a, b), c)| c == self.c(b, a))
    }

    /// True when every coefficient of total degree `≤ order` is exactly zero.
    pub fn is_zero_through(&self, order: usize) -> bool {
        order < self.prec && self.iter().filter(|((a, b), _)| a + b <= order).all(|(_, c)| c.is_zero())
    }

    pub fn max_magnitude_through(&self, order: usize) -> f64 {
        self.iter()
            .filter(|((a, b), _)| a + b <= order)
            .map(|(_, c)| c.magnitude())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .iter()
            .map(|((a, b), c)| json!({"i": a, "j": b, "coeff": c.to_json()}))
            .collect();
        json!({"precision": self.prec, "terms": terms})
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetalg::rat;

    type B = BiSeries<BigRational>;

    #[test]
    fn log_of_one_minus_xy() {
        let mut f = B::one(9);
        f.rows[1][1] = rat(-1, 3);
        let h = f.log().unwrap();
        for ((a, b), c) in h.iter() {
            let expect = if a == b && a > 0 {
                -num_traits::pow(rat(1, 3), a) / rat(a as i64, 1)
            } else {
                rat(0, 1)
            };
            assert_eq!(*c, expect, "({a},{b})");
        }
        assert_eq!(h.exp().unwrap(), f);
    }

    #[test]
    fn difference_quotient_and_composition() {
        let f = Series::polynomial(0, vec![rat(0, 1), rat(1, 1), rat(2, 1), rat(5, 1)], 8);
        let dq = B::difference_quotient(&f).unwrap();
        assert!(dq.is_symmetric());
        assert_eq!(dq.coeff(0, 0).unwrap(), rat(1, 1));
        assert_eq!(dq.coeff(1, 1).unwrap(), rat(5, 1));
        assert_eq!(dq.coeff(3, 0).unwrap(), rat(0, 1));
        let id = Series::variable(8);
        assert_eq!(dq.compose(&id, &id).unwrap(), dq);
        assert!(dq.coeff(7, 0).is_err());
    }
}
