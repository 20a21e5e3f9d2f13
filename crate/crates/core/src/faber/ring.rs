use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::jetalg::format::latex_rational;

/// Commutative coefficient ring for truncated series.
///
/// `inv` and `log` are partial: they return `None` where the ring has no
/// answer without a branch choice or a field extension.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn inv(&self) -> Option<Self>;
    fn log(&self) -> Option<Self>;
    /// Size used when reporting residuals; exact zero maps to `0.0`.
    fn magnitude(&self) -> f64;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn to_latex(&self) -> String {
        self.to_string()
    }
}

impl Ring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn log(&self) -> Option<Self> {
        One::is_one(self).then(Zero::zero)
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_latex(&self) -> String {
        if self.is_negative() {
            format!("-{}", latex_rational(&self.abs()))
        } else {
            latex_rational(self)
        }
    }
}

impl Ring for Complex<f64> {
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn inv(&self) -> Option<Self> {
        (!Ring::is_zero(self)).then(|| self.inv())
    }
    /// Principal logarithm, refused on the cut `(−∞, 0]`.
    fn log(&self) -> Option<Self> {
        (self.im != 0.0 || self.re > 0.0).then(|| self.ln())
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_json(&self) -> Value {
        json!([self.re, self.im])
    }
}

impl Ring for Complex<BigRational> {
    fn zero() -> Self {
        Complex::new(Zero::zero(), Zero::zero())
    }
    fn one() -> Self {
        Complex::new(One::one(), Zero::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex::new(r.clone(), Zero::zero())
    }
    fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        (!Zero::is_zero(&n)).then(|| Complex::new(&self.re / &n, -(&self.im / &n)))
    }
    fn log(&self) -> Option<Self> {
        (One::is_one(&self.re) && Zero::is_zero(&self.im)).then(<Self as Ring>::zero)
    }
    fn magnitude(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::INFINITY);
        let im = self.im.to_f64().unwrap_or(f64::INFINITY);
        re.hypot(im)
    }
    fn to_json(&self) -> Value {
        json!([self.re.to_string(), self.im.to_string()])
    }
    fn to_latex(&self) -> String {
        match (Zero::is_zero(&self.re), Zero::is_zero(&self.im)) {
            (_, true) => self.re.to_latex(),
            (true, false) => format!("{} i", self.im.to_latex()),
            (false, false) => format!("({} + {} i)", self.re.to_latex(), self.im.to_latex()),
        }
    }
}

/// Polynomial in `w, a_1, a_2, …` with rational coefficients. Variable 0
/// is `w`; variable `j ≥ 1` is `a_j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MPoly {
    terms: BTreeMap<Vec<u32>, BigRational>,
}

fn trim(mut e: Vec<u32>) -> Vec<u32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl MPoly {
    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::default();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(index: usize) -> Self {
        let mut e = vec![0; index + 1];
        e[index] = 1;
        let mut p = Self::default();
        p.add_term(e, One::one());
        p
    }

    pub fn w() -> Self {
        Self::var(0)
    }

    /// The symbol `a_j`, `j ≥ 1`.
    pub fn a(j: usize) -> Self {
        assert!(j >= 1, "coefficient symbols start at a_1");
        Self::var(j)
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        if Zero::is_zero(&c) {
            return;
        }
        let e = trim(e);
        let slot = self.terms.entry(e.clone()).or_insert_with(Zero::zero);
        *slot += c;
        if Zero::is_zero(slot) {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Degree in `w`.
    pub fn degree_w(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.first().copied().unwrap_or(0)).max()
    }

    /// Coefficient of `w^d`, a polynomial in the `a_j`.
    pub fn coeff_w(&self, d: u32) -> MPoly {
        let mut out = Self::default();
        for (e, c) in &self.terms {
            if e.first().copied().unwrap_or(0) == d {
                let mut rest = e.clone();
                if !rest.is_empty() {
                    rest[0] = 0;
                }
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(Zero::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// Substitutes `a_j = values[j − 1]`; symbols beyond `values` stay.
    pub fn substitute_a(&self, values: &[BigRational]) -> MPoly {
        let mut out = Self::default();
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = e.clone();
            for (j, v) in values.iter().enumerate() {
                if let Some(p) = rest.get_mut(j + 1) {
                    coeff *= num_traits::pow(v.clone(), *p as usize);
                    *p = 0;
                }
            }
            out.add_term(rest, coeff);
        }
        out
    }

    fn ordered(&self) -> Vec<(&Vec<u32>, &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let wa = a.first().copied().unwrap_or(0);
            let wb = b.first().copied().unwrap_or(0);
            let ta: u32 = a.iter().sum();
            let tb: u32 = b.iter().sum();
            wb.cmp(&wa).then(tb.cmp(&ta)).then(a.cmp(b))
        });
        v
    }

    fn render(&self, latex: bool) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let name = |j: usize| match (j, latex) {
            (0, _) => "w".to_string(),
            (j, true) => format!("a_{{{j}}}"),
            (j, false) => format!("a{j}"),
        };
        let mut out = String::new();
        for (idx, (e, c)) in self.ordered().into_iter().enumerate() {
            let neg = c.is_negative();
            out.push_str(match (idx, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            });
            let mag = c.abs();
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, p)| **p > 0)
                .map(|(j, p)| match (*p, latex) {
                    (1, _) => name(j),
                    (p, true) => format!("{}^{{{p}}}", name(j)),
                    (p, false) => format!("{}^{p}", name(j)),
                })
                .collect();
            let num = if latex { latex_rational(&mag) } else { mag.to_string() };
            let sep = if latex { " " } else { "*" };
            if factors.is_empty() {
                out.push_str(&num);
            } else {
                if !One::is_one(&mag) {
                    out.push_str(&num);
                    out.push_str(sep);
                }
                out.push_str(&factors.join(sep));
            }
        }
        out
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl Ring for MPoly {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::constant(One::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let n = ea.len().max(eb.len());
                let e: Vec<u32> = (0..n)
                    .map(|i| ea.get(i).copied().unwrap_or(0) + eb.get(i).copied().unwrap_or(0))
                    .collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
    fn from_rational(r: &BigRational) -> Self {
        Self::constant(r.clone())
    }
    fn inv(&self) -> Option<Self> {
        self.as_constant()
            .filter(|c| !Zero::is_zero(c))
            .map(|c| Self::constant(c.recip()))
    }
    fn log(&self) -> Option<Self> {
        self.as_constant()
            .filter(One::is_one)
            .map(|_| Self::default())
    }
    fn magnitude(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
    fn to_latex(&self) -> String {
        self.render(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetalg::rat;

    #[test]
    fn mpoly_arithmetic_and_display() {
        let w = MPoly::w();
        let a1 = MPoly::a(1);
        let p = w.mul(&w).sub(&a1.mul(&MPoly::from_int(2)));
        assert_eq!(p.to_string(), "w^2 - 2*a1");
        assert_eq!(p.to_latex(), "w^{2} - 2 a_{1}");
        assert_eq!(p.degree_w(), Some(2));
        assert_eq!(p.coeff_w(0), a1.mul(&MPoly::from_int(-2)));
        let q = p.substitute_a(&[rat(1, 2)]);
        assert_eq!(q.to_string(), "w^2 - 1");
        assert!(p.sub(&p).is_zero());
        assert_eq!(MPoly::from_int(3).inv(), Some(MPoly::constant(rat(1, 3))));
        assert_eq!(w.inv(), None);
    }

    #[test]
    fn partial_operations() {
        assert_eq!(Ring::log(&rat(1, 1)), Some(rat(0, 1)));
        assert_eq!(Ring::log(&rat(2, 1)), None);
        assert!(Ring::log(&Complex::new(-1.0, 0.0)).is_none());
        assert!(Ring::log(&Complex::new(0.0, 0.0)).is_none());
        let l = Ring::log(&Complex::new(0.0, 1.0)).unwrap();
        assert!((l.im - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let z = Complex::new(rat(1, 2), rat(-1, 3));
        assert_eq!(Ring::mul(&z, &Ring::inv(&z).unwrap()), <Complex<BigRational> as Ring>::one());
    }
}
