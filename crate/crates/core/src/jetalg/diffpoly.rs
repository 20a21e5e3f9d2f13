use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::JetMonomial;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Differential polynomial in the jet variables `u_0, u_1, …` with exact
/// rational coefficients.
///
/// The term map never stores a zero coefficient, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct DiffPoly {
    terms: BTreeMap<JetMonomial, BigRational>,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl DiffPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_terms([(JetMonomial::one(), c)])
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The jet variable `u_j`.
    pub fn u(j: usize) -> Self {
        Self::monomial(JetMonomial::var(j), BigRational::one())
    }

    pub fn monomial(m: JetMonomial, c: BigRational) -> Self {
        Self::from_terms([(m, c)])
    }

    pub fn from_terms<I: IntoIterator<Item = (JetMonomial, BigRational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: JetMonomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (graded) order.
    pub fn terms(&self) -> impl Iterator<Item = (&JetMonomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &JetMonomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coefficient(&JetMonomial::one())
    }

    /// Highest jet index occurring in any term.
    pub fn max_jet(&self) -> Option<usize> {
        self.terms.keys().filter_map(JetMonomial::top).max()
    }

    /// Common scaling weight of all terms, `None` if inhomogeneous or zero.
    pub fn weight(&self) -> Option<u32> {
        let mut weights = self.terms.keys().map(JetMonomial::weight);
        let first = weights.next()?;
        weights.all(|w| w == first).then_some(first)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    /// `∂P/∂u_j`.
    pub fn partial(&self, j: usize) -> Self {
        Self::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let e = m.exponent(j);
            (e > 0).then(|| (m.shift(j, -1).unwrap(), c * BigInt::from(e)))
        }))
    }

    /// Total derivative `D_s P = Σ_j (∂P/∂u_j) u_{j+1}`.
    pub fn total_derivative(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (j, e) in m.iter() {
                let lowered = m.shift(j, -1).unwrap();
                let raised = lowered.shift(j + 1, 1).unwrap();
                out.add_term(raised, c * BigInt::from(e));
            }
        }
        out
    }

    pub fn total_derivative_n(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |p, _| p.total_derivative())
    }

    /// Euler operator `E(P) = Σ_j (−D_s)^j ∂P/∂u_j`; vanishes exactly on
    /// total derivatives plus constants.
    pub fn euler_operator(&self) -> Self {
        let Some(top) = self.max_jet() else {
            return Self::zero();
        };
        let mut out = Self::zero();
        for j in 0..=top {
            let mut term = self.partial(j).total_derivative_n(j);
            if j % 2 == 1 {
                term = -term;
            }
            out += term;
        }
        out
    }

    /// Formal antiderivative in `u_j`: `∫ P du_j`.
    fn integrate_in(&self, j: usize) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| {
            let e = m.exponent(j) + 1;
            (m.shift(j, 1).unwrap(), c / BigInt::from(e))
        }))
    }

    /// Returns `Q` with `D_s Q = P` and zero constant term.
    ///
    /// Integration by parts on the highest jet variable: an exact `P` with
    /// top variable `u_h` is linear in it, `P = B·u_h + C`, and
    /// `R = ∫B du_{h−1}` removes `u_h` from `P − D_s R`.
    pub fn antiderivative(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::NotExact(format!(
                "nonzero constant term {}",
                self.constant_term()
            )));
        }
        let euler = self.euler_operator();
        if !euler.is_zero() {
            return Err(Error::NotExact(format!("Euler operator gives {euler}")));
        }
        let mut rest = self.clone();
        let mut acc = Self::zero();
        while let Some(h) = rest.max_jet() {
            if h == 0 {
                return Err(Error::NotExact(format!("residual {rest} depends on u0 only")));
            }
            let mut linear = Self::zero();
            for (m, c) in &rest.terms {
                match m.exponent(h) {
                    0 => {}
                    1 => linear.add_term(m.shift(h, -1).unwrap(), c.clone()),
                    _ => {
                        return Err(Error::NotExact(format!(
                            "nonlinear in top variable u{h}"
                        )))
                    }
                }
            }
            let r = linear.integrate_in(h - 1);
            rest -= r.total_derivative();
            acc += r;
        }
        if !rest.is_zero() {
            return Err(Error::NotExact(format!("residual constant {rest}")));
        }
        Ok(acc)
    }

    /// Fréchet derivative `P′[Q] = Σ_j (∂P/∂u_j) D_s^j Q`.
    pub fn frechet(&self, direction: &Self) -> Self {
        let Some(top) = self.max_jet() else {
            return Self::zero();
        };
        let mut out = Self::zero();
        let mut dq = direction.clone();
        for j in 0..=top {
            let dp = self.partial(j);
            if !dp.is_zero() {
                out += &dp * &dq;
            }
            dq = dq.total_derivative();
        }
        out
    }

    /// Commutator of the evolutionary flows `∂_t k = P`, `∂_τ k = Q`:
    /// `Q′[P] − P′[Q]`.
    pub fn lie_bracket(&self, other: &Self) -> Self {
        other.frechet(self) - self.frechet(other)
    }

    /// Coefficients `(j, c_j)` of the linearization about the constant
    /// state `u_0 = k̄`, `u_{j>0} = 0`: `Σ_j c_j u_j`.
    pub fn linearization_at_constant<T: Real>(&self, kbar: T) -> Vec<(usize, T)> {
        let Some(top) = self.max_jet() else {
            return Vec::new();
        };
        (0..=top)
            .filter_map(|j| {
                let dp = self.partial(j);
                let c = dp
                    .terms
                    .iter()
                    .filter(|(m, _)| m.top().is_none_or(|t| t == 0))
                    .fold(T::zero(), |acc, (m, c)| {
                        acc + coeff_to::<T>(c) * kbar.powi(m.exponent(0) as i32)
                    });
                (c != T::zero()).then_some((j, c))
            })
            .collect()
    }

    /// Evaluates pointwise on a jet table, `jets[j][i] = ∂_s^j k(s_i)`.
    pub fn evaluate<T: Real>(&self, jets: &[Vec<T>]) -> Vec<T> {
        let n = jets.first().map_or(0, Vec::len);
        let mut out = vec![T::zero(); n];
        for (m, c) in &self.terms {
            let c = coeff_to::<T>(c);
            for (i, o) in out.iter_mut().enumerate() {
                let mut v = c;
                for (j, e) in m.iter() {
                    v *= jets[j][i].powi(e as i32);
                }
                *o += v;
            }
        }
        out
    }
}

pub(crate) fn coeff_to<T: Real>(c: &BigRational) -> T {
    lit(c.to_f64().unwrap_or(f64::NAN))
}

impl Add<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for DiffPoly {
    type Output = DiffPoly;
    fn add(mut self, rhs: DiffPoly) -> DiffPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign for DiffPoly {
    fn add_assign(&mut self, rhs: DiffPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl SubAssign for DiffPoly {
    fn sub_assign(&mut self, rhs: DiffPoly) {
        *self -= &rhs;
    }
}

impl Sub<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for DiffPoly {
    type Output = DiffPoly;
    fn sub(mut self, rhs: DiffPoly) -> DiffPoly {
        self -= &rhs;
        self
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -self.clone()
    }
}

impl Mul<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        &self * &rhs
    }
}

impl Mul<&BigRational> for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &BigRational) -> DiffPoly {
        self.scale(rhs)
    }
}

impl std::fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DiffPoly({self})")
    }
}

/// Sign-aware helper shared by the text and LaTeX writers.
pub(crate) fn split_sign(c: &BigRational) -> (bool, BigRational) {
    (c.is_negative(), c.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(j: usize) -> DiffPoly {
        DiffPoly::u(j)
    }

    fn c(n: i64, d: i64) -> DiffPoly {
        DiffPoly::constant(rat(n, d))
    }

    #[test]
    fn total_derivative_examples() {
        assert_eq!(u(0).total_derivative(), u(1));
        assert_eq!((&u(0) * &u(0)).total_derivative(), &c(2, 1) * &(&u(0) * &u(1)));
        assert!(DiffPoly::one().total_derivative().is_zero());
    }

    #[test]
    fn euler_operator_examples() {
        assert!((&u(0) * &u(1)).euler_operator().is_zero());
        assert_eq!(u(0).euler_operator(), DiffPoly::one());
        assert_eq!((&u(1) * &u(1)).euler_operator(), &c(-2, 1) * &u(2));
    }

    #[test]
    fn antiderivative_examples() {
        assert_eq!(
            (&u(0) * &u(1)).antiderivative().unwrap(),
            &c(1, 2) * &(&u(0) * &u(0))
        );
        assert!(matches!(u(0).antiderivative(), Err(Error::NotExact(_))));
        assert!(matches!(DiffPoly::one().antiderivative(), Err(Error::NotExact(_))));
        let p = &(&u(0) * &u(0)) * &u(1);
        assert_eq!(
            p.antiderivative().unwrap(),
            &c(1, 3) * &(&(&u(0) * &u(0)) * &u(0))
        );
        assert!(DiffPoly::zero().antiderivative().unwrap().is_zero());
    }

    #[test]
    fn frechet_examples() {
        let q = &(&u(2) * &u(0)) + &u(3);
        assert_eq!(u(1).frechet(&q), q.total_derivative());
        assert_eq!(
            (&u(0) * &u(0)).frechet(&u(1)),
            &c(2, 1) * &(&u(0) * &u(1))
        );
        let k2 = &u(3) + &(&c(3, 2) * &(&(&u(0) * &u(0)) * &u(1)));
        let expect = &(&u(4) + &(&c(3, 1) * &(&u(0) * &(&u(1) * &u(1)))))
            + &(&c(3, 2) * &(&(&u(0) * &u(0)) * &u(2)));
        assert_eq!(k2.frechet(&u(1)), expect);
    }

    #[test]
    fn translation_commutes_with_autonomous_flows() {
        let q = &(&u(0) * &u(2)) + &(&(&u(1) * &u(1)) * &u(0));
        assert!(u(1).lie_bracket(&q).is_zero());
        assert!(q.lie_bracket(&q).is_zero());
    }

    #[test]
    fn linearization_about_constant() {
        let k2 = &u(3) + &(&c(3, 2) * &(&(&u(0) * &u(0)) * &u(1)));
        let lin = k2.linearization_at_constant(2.0f64);
        assert_eq!(lin, vec![(1, 6.0), (3, 1.0)]);
    }
}
