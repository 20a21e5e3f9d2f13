//! Truncated series laboratory: Faber polynomials, Grunsky coefficients,
//! the Schwarzian of a series and the inverse-function bridge between a
//! loop chart `Z(s)` and the Laurent chart `1/Z`.
//!
//! Conventions:
//!
//! * A chart is `f(q) = 1/q + a_1 q + a_2 q² + …`. Its coefficient list is
//!   either a finite Laurent polynomial ([`Coefficients::exact`]) or a
//!   series known only through the listed order
//!   ([`Coefficients::truncated`]); the latter makes every operation that
//!   would need a missing coefficient fail with
//!   [`Error::InsufficientOrder`].
//! * Faber polynomials: `log(q(f(q) − w)) = −Σ_{n≥1} P_n(w) qⁿ / n`.
//! * Grunsky coefficients:
//!   `log((f(p) − f(q))/(1/p − 1/q)) = Σ_{m,n≥1} h_{m,n} pᵐ qⁿ`, which gives
//!   `h_{1,1} = −a_1` and `{f, q} = 6 Σ m n h_{m,n} q^{m+n−2}`.

mod biseries;
mod ring;
mod series;

pub use biseries::BiSeries;
pub use ring::{MPoly, Ring};
pub use series::Series;

use num_complex::Complex;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::jetalg::format::parse_rational_str;

/// Coefficient list `a_1, a_2, …` of a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients<R> {
    values: Vec<R>,
    exact: bool,
}

impl<R: Ring> Coefficients<R> {
    /// All coefficients beyond the list are exactly zero.
    pub fn exact(values: Vec<R>) -> Self {
        Self { values, exact: true }
    }

    /// Coefficients beyond the list are unknown.
    pub fn truncated(values: Vec<R>) -> Self {
        Self {
            values,
            exact: false,
        }
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// `a_k`, `k ≥ 1`.
    pub fn get(&self, k: usize) -> Result<R> {
        match self.values.get(k - 1) {
            Some(v) => Ok(v.clone()),
            None if self.exact => Ok(R::zero()),
            None => Err(Error::InsufficientOrder(format!(
                "a_{k} requested, only a_1..a_{} given",
                self.values.len()
            ))),
        }
    }

    /// Fails unless `a_1..a_k` are available.
    pub fn require(&self, k: usize) -> Result<()> {
        if k >= 1 {
            self.get(k)?;
        }
        Ok(())
    }

    /// `A(x) = Σ_{k=1}^{through} a_k x^k`, precision `through + 1`.
    fn tail_series(&self, through: usize) -> Result<Series<R>> {
        self.require(through)?;
        let mut c = vec![R::zero()];
        for k in 1..=through {
            c.push(self.get(k)?);
        }
        Ok(Series::new(0, c))
    }

    /// `f(q) = 1/q + Σ a_k q^k` known through `q^{through}`.
    pub fn laurent_chart(&self, through: usize) -> Result<Series<R>> {
        let a = self.tail_series(through)?;
        let mut c = vec![R::one(), R::zero()];
        c.extend(a.iter().skip(1).map(|(_, v)| v.clone()));
        Ok(Series::new(-1, c))
    }

    /// `Z(s) = s + Σ a_k s^{k+1}` known through `s^{through+1}`.
    pub fn loop_chart(&self, through: usize) -> Result<Series<R>> {
        let a = self.tail_series(through)?;
        let mut c = vec![R::zero(), R::one()];
        c.extend(a.iter().skip(1).map(|(_, v)| v.clone()));
        Ok(Series::new(0, c))
    }
}

impl Coefficients<BigRational> {
    /// Parses `["p/q", …]`.
    pub fn parse(values: &[String], exact: bool) -> Result<Self> {
        let v = values
            .iter()
            .map(|s| parse_rational_str(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(if exact { Self::exact(v) } else { Self::truncated(v) })
    }
}

/// `P_0, …, P_n` from the generating function, as polynomials in `w`
/// whose coefficients are the given `a` (rational constants or symbols).
pub fn faber_polynomials_in(a: &Coefficients<MPoly>, n: usize) -> Result<Vec<MPoly>> {
    if n == 0 {
        return Ok(vec![MPoly::one()]);
    }
    a.require(n - 1)?;
    let mut c = vec![MPoly::one(), MPoly::w().neg()];
    for k in 1..n {
        c.push(a.get(k)?);
    }
    let l = Series::new(0, c).log()?;
    let mut out = vec![MPoly::one()];
    for m in 1..=n {
        out.push(l.coeff(m as i64)?.mul(&MPoly::from_int(-(m as i64))));
    }
    Ok(out)
}

/// `P_0, …, P_n` by the recurrence
/// `P_{m+1} = −(m+1) F_{m+1} − Σ_{j=1}^{m} F_j P_{m+1−j}` with
/// `F = 1 − w q + Σ a_k q^{k+1}`.
pub fn faber_by_recurrence(a: &Coefficients<MPoly>, n: usize) -> Result<Vec<MPoly>> {
    if n >= 1 {
        a.require(n - 1)?;
    }
    let f = |j: usize| -> Result<MPoly> {
        Ok(match j {
            0 => MPoly::one(),
            1 => MPoly::w().neg(),
            j => a.get(j - 1)?,
        })
    };
    let mut p = vec![MPoly::one()];
    for m in 0..n {
        let mut next = f(m + 1)?.mul(&MPoly::from_int(-(m as i64 + 1)));
        for j in 1..=m {
            next = next.sub(&f(j)?.mul(&p[m + 1 - j]));
        }
        p.push(next);
    }
    Ok(p)
}

/// Faber polynomials of a chart with rational coefficients.
pub fn faber_polynomials(a: &Coefficients<BigRational>, n: usize) -> Result<Vec<MPoly>> {
    let lifted = Coefficients {
        values: a.values.iter().cloned().map(MPoly::constant).collect(),
        exact: a.exact,
    };
    faber_polynomials_in(&lifted, n)
}

/// The symbolic `P_0..P_n` in `w, a_1, …, a_{n−1}`.
pub fn faber_symbolic(n: usize) -> Vec<MPoly> {
    let a = Coefficients::exact((1..n.max(1)).map(MPoly::a).collect());
    faber_polynomials_in(&a, n).expect("symbolic coefficients are complete")
}

/// `log((f(p) − f(q))/(1/p − 1/q))` through total degree `< prec`.
/// The ratio equals `1 − p q · (A(p) − A(q))/(p − q)` with
/// `A(x) = Σ a_k x^k`.
pub fn grunsky_series<R: Ring>(a: &Coefficients<R>, prec: usize) -> Result<BiSeries<R>> {
    let through = prec.saturating_sub(2);
    let dq = BiSeries::difference_quotient(&a.tail_series(through)?)?;
    let ratio = BiSeries::one(prec).sub(&dq.shift(1, 1)).truncate(prec);
    if ratio.precision() < prec {
        return Err(Error::InsufficientOrder(format!(
            "Grunsky series needs total degree < {prec}"
        )));
    }
    ratio.log()
}

/// Grunsky matrix `h_{m,n}`, `1 ≤ m, n ≤ order`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrunskyMatrix<R> {
    pub order: usize,
    /// `entries[m − 1][n − 1] = h_{m,n}`.
    pub entries: Vec<Vec<R>>,
}

impl<R: Ring> GrunskyMatrix<R> {
    pub fn get(&self, m: usize, n: usize) -> &R {
        &self.entries[m - 1][n - 1]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.order).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order,
            "h": self
                .entries
                .iter()
                .map(|row| row.iter().map(Ring::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn to_latex(&self) -> String {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|row| row.iter().map(Ring::to_latex).collect::<Vec<_>>().join(" & "))
            .collect();
        format!("\\begin{{pmatrix}}\n{}\n\\end{{pmatrix}}", rows.join(" \\\\\n"))
    }
}

/// The `order × order` Grunsky matrix; needs `a_1..a_{2·order−1}`.
pub fn grunsky<R: Ring>(a: &Coefficients<R>, order: usize) -> Result<GrunskyMatrix<R>> {
    if order == 0 {
        return Err(Error::InvalidInput("Grunsky order must be at least 1".into()));
    }
    a.require(2 * order - 1)?;
    let h = grunsky_series(a, 2 * order + 1)?;
    let entries = (1..=order)
        .map(|m| (1..=order).map(|n| h.coeff(m, n)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(GrunskyMatrix { order, entries })
}

/// `{f, q} = f‴/f′ − (3/2)(f″/f′)²` through `q^{order}`.
pub fn schwarzian_series<R: Ring>(f: &Series<R>, order: i64) -> Result<Series<R>> {
    let d1 = f.derivative();
    let d2 = d1.derivative();
    let d3 = d2.derivative();
    let r2 = d2.div(&d1)?;
    let r3 = d3.div(&d1)?;
    let three_halves = R::from_rational(&BigRational::new(3.into(), 2.into()));
    let s = r3.sub(&r2.mul(&r2).scale(&three_halves));
    s.require(order)?;
    Ok(s.truncate(order + 1))
}

/// `{f, q} − 6 Σ m n h_{m,n} q^{m+n−2}` through `q^{order − 2}`.
pub fn schwarzian_grunsky_check<R: Ring>(a: &Coefficients<R>, order: usize) -> Result<Series<R>> {
    if order < 2 {
        return Err(Error::InvalidInput("check order must be at least 2".into()));
    }
    a.require(order - 1)?;
    let top = order as i64 - 2;
    let s = schwarzian_series(&a.laurent_chart(order - 1)?, top)?;
    let h = grunsky_series(a, order + 1)?;
    let six = R::from_int(6);
    let rhs: Vec<R> = (0..=top as usize)
        .map(|e| {
            let d = e + 2;
            (1..d).fold(R::zero(), |acc, m| {
                let n = d - m;
                let w = R::from_int((m * n) as i64).mul(&six);
                acc.add(&h.coeff(m, n).expect("within precision").mul(&w))
            })
        })
        .collect();
    Ok(s.sub(&Series::new(0, rhs)))
}

/// `G` with `s = G(1/p)` for `p = 1/Z(s)`: the inverse of the chart
/// `1/Z`, obtained by Lagrange inversion of `Z = 1/p`.
pub fn inverse_chart<R: Ring>(z: &Series<R>) -> Result<Series<R>> {
    let p = z.inverse()?;
    if p.start() != -1 {
        return Err(Error::NotInvertible("1/Z must have a simple pole at s = 0".into()));
    }
    p.inverse()?.reversion()
}

/// `log((Z(s) − Z(s′))/(s − s′)) + log((g(p) − g(q))/(1/p − 1/q))` with
/// `p = 1/Z(s)`, `q = 1/Z(s′)`, through total degree `order`. Zero when
/// the inverse function is consistent with the chart.
pub fn bridge_check<R: Ring>(loop_taylor: &Coefficients<R>, order: usize) -> Result<BiSeries<R>> {
    loop_taylor.require(order)?;
    let z = loop_taylor.loop_chart(order)?;
    let lhs = BiSeries::difference_quotient(&z)?.log()?;
    let g = inverse_chart(&z)?;
    let inner = BiSeries::difference_quotient(&g)?.compose(&z, &z)?;
    let rhs = inner.log()?;
    let residual = lhs.add(&rhs);
    if residual.precision() <= order {
        return Err(Error::InsufficientOrder(format!(
            "bridge residual known below total degree {}",
            residual.precision()
        )));
    }
    Ok(residual.truncate(order + 1))
}

/// Coefficients `c_{a,b}` of
/// `½ log((Z(s₂) − Z(s₁))/(s₂ − s₁)) = Σ c_{a,b} s₁ᵃ s₂ᵇ` through total
/// degree `order`.
pub fn expansion_coefficients<R: Ring>(loop_taylor: &Coefficients<R>, order: usize) -> Result<BiSeries<R>> {
    loop_taylor.require(order)?;
    let z = loop_taylor.loop_chart(order)?;
    let half = R::from_rational(&BigRational::new(1.into(), 2.into()));
    let out = BiSeries::difference_quotient(&z)?.log()?.scale(&half);
    Ok(out.truncate(order + 1))
}

/// Taylor coefficients `a_k = i^k/(k+1)!` of the unit circle chart
/// `Z = (e^{is} − 1)/i`.
pub fn circle_chart(order: usize) -> Coefficients<Complex<BigRational>> {
    let mut fact = BigRational::from_integer(1.into());
    let mut values = Vec::with_capacity(order);
    for k in 1..=order {
        fact *= BigRational::from_integer(((k + 1) as i64).into());
        let mag = fact.recip();
        let zero = BigRational::from_integer(0.into());
        values.push(match k % 4 {
            0 => Complex::new(mag, zero),
            1 => Complex::new(zero, mag),
            2 => Complex::new(-mag, zero),
            _ => Complex::new(zero, -mag),
        });
    }
    Coefficients::truncated(values)
}

#[cfg(test)]
mod tests;
