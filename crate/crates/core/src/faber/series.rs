use std::fmt;

use num_rational::BigRational;
use serde_json::{json, Value};

use super::ring::Ring;
use crate::error::{Error, Result};

/// Truncated Laurent series `Σ_{n = start}^{prec − 1} c_n qⁿ + O(q^prec)`.
///
/// Every operation propagates the absolute precision honestly: asking for
/// a coefficient at or beyond `prec` is an error rather than a silent zero.
///
/// Equality compares the represented series: same precision and the same
/// coefficients, regardless of leading zeros in storage.
#[derive(Clone, Debug)]
pub struct Series<R> {
    start: i64,
    coeffs: Vec<R>,
}

impl<R: Ring> PartialEq for Series<R> {
    fn eq(&self, other: &Self) -> bool {
        self.precision() == other.precision()
            && (self.start.min(other.start)..self.precision())
                .all(|n| self.coeff(n).ok() == other.coeff(n).ok())
    }
}

fn recip_int<R: Ring>(n: i64) -> R {
    R::from_rational(&BigRational::new(1.into(), n.into()))
}

impl<R: Ring> Series<R> {
    /// Coefficients `c_start, c_{start+1}, …`; precision `start + len`.
    pub fn new(start: i64, coeffs: Vec<R>) -> Self {
        Self { start, coeffs }
    }

    /// A Laurent polynomial padded with zeros up to absolute precision
    /// `prec`.
    pub fn polynomial(start: i64, mut coeffs: Vec<R>, prec: i64) -> Self {
        let len = (prec - start).max(0) as usize;
        coeffs.truncate(len);
        coeffs.resize(len, R::zero());
        Self { start, coeffs }
    }

    pub fn zero(prec: i64) -> Self {
        Self::polynomial(0, Vec::new(), prec)
    }

    pub fn one(prec: i64) -> Self {
        Self::polynomial(0, vec![R::one()], prec)
    }

    /// `q`, known exactly to the given precision.
    pub fn variable(prec: i64) -> Self {
        Self::polynomial(1, vec![R::one()], prec)
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn precision(&self) -> i64 {
        self.start + self.coeffs.len() as i64
    }

    /// `c_n`; zero below `start`, an error at or beyond the precision.
    pub fn coeff(&self, n: i64) -> Result<R> {
        if n < self.start {
            return Ok(R::zero());
        }
        self.coeffs
            .get((n - self.start) as usize)
            .cloned()
            .ok_or_else(|| {
                Error::InsufficientOrder(format!(
                    "coefficient of q^{n} requested, series known to O(q^{})",
                    self.precision()
                ))
            })
    }

    fn c(&self, n: i64) -> R {
        if n < self.start || n >= self.precision() {
            R::zero()
        } else {
            self.coeffs[(n - self.start) as usize].clone()
        }
    }

    /// Known coefficients as `(exponent, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &R)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.start + i as i64, c))
    }

    /// Exponent of the first nonzero known coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.iter().find(|(_, c)| !c.is_zero()).map(|(n, _)| n)
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let len = (prec - self.start).clamp(0, self.coeffs.len() as i64) as usize;
        Self {
            start: self.start,
            coeffs: self.coeffs[..len].to_vec(),
        }
    }

    /// Fails unless the series is known through `q^{order}`.
    pub fn require(&self, order: i64) -> Result<()> {
        if self.precision() <= order {
            return Err(Error::InsufficientOrder(format!(
                "need terms through q^{order}, series known to O(q^{})",
                self.precision()
            )));
        }
        Ok(())
    }

    /// True when every coefficient through `q^{order}` is exactly zero.
    pub fn is_zero_through(&self, order: i64) -> bool {
        self.precision() > order && self.iter().take_while(|(n, _)| *n <= order).all(|(_, c)| c.is_zero())
    }

    /// Largest coefficient magnitude through `q^{order}`.
    pub fn max_magnitude_through(&self, order: i64) -> f64 {
        self.iter()
            .take_while(|(n, _)| *n <= order)
            .map(|(_, c)| c.magnitude())
            .fold(0.0, f64::max)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&R, &R) -> R) -> Self {
        let start = self.start.min(rhs.start);
        let prec = self.precision().min(rhs.precision());
        let coeffs = (start..prec).map(|n| f(&self.c(n), &rhs.c(n))).collect();
        Self { start, coeffs }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, R::add)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, R::sub)
    }

    pub fn neg(&self) -> Self {
        self.map(R::neg)
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|x| x.mul(c))
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Series<S> {
        Series {
            start: self.start,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            start: self.start + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let start = self.start + rhs.start;
        let len = self.coeffs.len().min(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|n| {
                (0..=n).fold(R::zero(), |acc, i| {
                    acc.add(&self.coeffs[i].mul(&rhs.coeffs[n - i]))
                })
            })
            .collect();
        Self { start, coeffs }
    }

    pub fn pow(&self, n: u32) -> Self {
        if n == 0 {
            return Self::one(self.coeffs.len() as i64);
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.mul(self);
        }
        out
    }

    /// Drops known leading zeros so that the first stored coefficient is
    /// the valuation's.
    fn normalized(&self) -> Result<Self> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::NotInvertible("series is zero to its known order".into()))?;
        Ok(Self {
            start: v,
            coeffs: self.coeffs[(v - self.start) as usize..].to_vec(),
        })
    }

    /// Multiplicative inverse; the leading coefficient must be a unit.
    pub fn inverse(&self) -> Result<Self> {
        let f = self.normalized()?;
        let lead_inv = f.coeffs[0].inv().ok_or_else(|| {
            Error::NotInvertible(format!("leading coefficient {} is not a unit", f.coeffs[0]))
        })?;
        let len = f.coeffs.len();
        let mut g: Vec<R> = Vec::with_capacity(len);
        g.push(lead_inv.clone());
        for n in 1..len {
            let s = (1..=n).fold(R::zero(), |acc, j| acc.add(&f.coeffs[j].mul(&g[n - j])));
            g.push(s.mul(&lead_inv).neg());
        }
        Ok(Self {
            start: -f.start,
            coeffs: g,
        })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inverse()?))
    }

    pub fn derivative(&self) -> Self {
        let coeffs: Vec<R> = self
            .iter()
            .map(|(n, c)| c.mul(&R::from_int(n)))
            .collect();
        if self.start == 0 {
            Self {
                start: 0,
                coeffs: coeffs.into_iter().skip(1).collect(),
            }
        } else {
            Self {
                start: self.start - 1,
                coeffs,
            }
        }
    }

    /// Antiderivative with zero constant term; needs no `q⁻¹` term.
    pub fn integral(&self) -> Result<Self> {
        if self.start <= -1 && (self.precision() <= -1 || !self.c(-1).is_zero()) {
            return Err(Error::NotInvertible("series has a residue term".into()));
        }
        let coeffs = self
            .iter()
            .map(|(n, c)| if n == -1 { R::zero() } else { c.mul(&recip_int(n + 1)) })
            .collect();
        Ok(Self {
            start: self.start + 1,
            coeffs,
        })
    }

    /// `log f` for `f = c(1 + O(q))`, with `log c` taken in the ring.
    pub fn log(&self) -> Result<Self> {
        let f = self.normalized()?;
        if f.start != 0 {
            return Err(Error::NotInvertible(format!(
                "log of a series with valuation {}",
                f.start
            )));
        }
        let c0 = f.coeffs[0].log().ok_or_else(|| {
            Error::NotInvertible(format!("log of constant term {} has no branch-free value", f.coeffs[0]))
        })?;
        let tail = f.derivative().div(&f)?.integral()?;
        Ok(tail.add(&Self::polynomial(0, vec![c0], tail.precision())))
    }

    /// `exp f` for `f = O(q)`.
    pub fn exp(&self) -> Result<Self> {
        if self.precision() <= 0 || self.iter().any(|(n, c)| n <= 0 && !c.is_zero()) {
            return Err(Error::NotInvertible("exp needs a series vanishing at q = 0".into()));
        }
        let prec = self.precision();
        let mut g: Vec<R> = vec![R::one()];
        for n in 1..prec {
            let s = (1..=n).fold(R::zero(), |acc, k| {
                acc.add(&self.c(k).mul(&R::from_int(k)).mul(&g[(n - k) as usize]))
            });
            g.push(s.mul(&recip_int(n)));
        }
        Ok(Self::new(0, g))
    }

    /// `self ∘ inner` for `inner = O(q)`. Negative powers of `self` go
    /// through `inner⁻¹`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let v = inner.valuation().unwrap_or(inner.precision());
        if v < 1 {
            return Err(Error::InvalidInput(
                "composition needs an inner series vanishing at 0".into(),
            ));
        }
        let cap = self.precision().saturating_mul(v);
        let mut acc = Self::zero(cap);
        if self.start >= 0 {
            let mut power = Self::one(cap);
            for n in 0..self.precision() {
                if n >= self.start {
                    acc = acc.add(&power.scale(&self.c(n)));
                }
                power = power.mul(inner);
            }
        } else {
            let inv = inner.inverse()?;
            for (n, c) in self.iter() {
                let term = if n >= 0 {
                    inner.pow(n as u32)
                } else {
                    inv.pow((-n) as u32)
                };
                acc = acc.add(&term.scale(c));
            }
        }
        Ok(acc.truncate(cap))
    }

    /// Compositional inverse `G` of `Z = c_1 q + …` (`c_1` a unit), by
    /// Lagrange inversion: `[tⁿ]G = (1/n)[q^{n−1}](q/Z)ⁿ`.
    pub fn reversion(&self) -> Result<Self> {
        if self.c(0) != R::zero() || self.start < 0 {
            return Err(Error::NotInvertible("reversion needs Z(0) = 0".into()));
        }
        if self.c(1).inv().is_none() {
            return Err(Error::NotInvertible("reversion needs a unit linear coefficient".into()));
        }
        let ratio = self.shift(-1).inverse()?;
        let prec = self.precision();
        let mut coeffs = vec![R::zero()];
        let mut power = Self::one(prec);
        for n in 1..prec {
            power = power.mul(&ratio);
            coeffs.push(power.coeff(n - 1)?.mul(&recip_int(n)));
        }
        Ok(Self::new(0, coeffs))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "start": self.start,
            "precision": self.precision(),
            "coeffs": self.coeffs.iter().map(Ring::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn to_latex(&self) -> String {
        let terms: Vec<String> = self
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| match n {
                0 => c.to_latex(),
                1 => format!("{} q", c.to_latex()),
                n => format!("{} q^{{{n}}}", c.to_latex()),
            })
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        format!("{body} + O(q^{{{}}})", self.precision())
    }
}

impl<R: Ring> fmt::Display for Series<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.iter().filter(|(_, c)| !c.is_zero()) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*q")?,
                n => write!(f, "({c})*q^{n}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.precision())
    }
}
