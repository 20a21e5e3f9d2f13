use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Monomial `∏ u_j^{e_j}` in the jet variables `u_j = ∂_s^j k`.
///
/// Stored densely by jet index with trailing zeros trimmed, so the empty
/// vector is the constant monomial `1`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct JetMonomial {
    exps: Vec<u32>,
}

impl JetMonomial {
    pub fn one() -> Self {
        Self { exps: Vec::new() }
    }

    /// The single jet variable `u_j`.
    pub fn var(j: usize) -> Self {
        Self::var_pow(j, 1)
    }

    pub fn var_pow(j: usize, e: u32) -> Self {
        let mut exps = vec![0; j + 1];
        exps[j] = e;
        Self::from_dense(exps)
    }

    pub fn from_dense(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Self { exps }
    }

    /// Builds a monomial from `(jet index, exponent)` pairs; repeated
    /// indices accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (usize, u32)>>(pairs: I) -> Self {
        let mut exps = Vec::new();
        for (j, e) in pairs {
            if exps.len() <= j {
                exps.resize(j + 1, 0);
            }
            exps[j] += e;
        }
        Self::from_dense(exps)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, j: usize) -> u32 {
        self.exps.get(j).copied().unwrap_or(0)
    }

    /// Highest jet index present, `None` for the constant monomial.
    pub fn top(&self) -> Option<usize> {
        self.exps.len().checked_sub(1)
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// Scaling weight `Σ e_j (j + 1)`: `u_j` scales like `∂_s^{j+1}`.
    pub fn weight(&self) -> u32 {
        self.exps
            .iter()
            .enumerate()
            .map(|(j, e)| e * (j as u32 + 1))
            .sum()
    }

    /// Nonzero `(index, exponent)` pairs in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(j, e)| (j, *e))
    }

    pub fn to_map(&self) -> BTreeMap<usize, u32> {
        self.iter().collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.exps.len().max(other.exps.len());
        let exps = (0..n)
            .map(|j| self.exponent(j) + other.exponent(j))
            .collect();
        Self::from_dense(exps)
    }

    /// Multiplies by `u_j^{delta}` where `delta` may be negative; `None`
    /// if an exponent would become negative.
    pub fn shift(&self, j: usize, delta: i64) -> Option<Self> {
        let e = self.exponent(j) as i64 + delta;
        if e < 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        if exps.len() <= j {
            exps.resize(j + 1, 0);
        }
        exps[j] = e as u32;
        Some(Self::from_dense(exps))
    }
}

/// Graded order: lower total degree first; ties broken from the highest
/// jet index down, larger exponent first. This is the canonical text order,
/// e.g. `u5 + 5/2*u0^2*u3 + 10*u0*u1*u2 + 5/2*u1^3 + ...`.
impl Ord for JetMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.exps.len().max(other.exps.len());
            for j in (0..n).rev() {
                match other.exponent(j).cmp(&self.exponent(j)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for JetMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for JetMonomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(j, e)| {
                if e == 1 {
                    format!("u{j}")
                } else {
                    format!("u{j}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_is_additive() {
        let a = JetMonomial::from_pairs([(0, 2), (1, 1)]);
        let b = JetMonomial::from_pairs([(3, 1)]);
        assert_eq!(a.weight(), 4);
        assert_eq!(b.weight(), 4);
        assert_eq!(a.mul(&b).weight(), 8);
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let m = JetMonomial::from_dense(vec![1, 0, 0]);
        assert_eq!(m, JetMonomial::var(0));
        assert_eq!(m.shift(0, -1), Some(JetMonomial::one()));
        assert_eq!(JetMonomial::one().shift(2, -1), None);
    }

    #[test]
    fn canonical_order() {
        let mut v = vec![
            JetMonomial::from_pairs([(1, 3)]),
            JetMonomial::from_pairs([(0, 1), (1, 1), (2, 1)]),
            JetMonomial::var(5),
            JetMonomial::from_pairs([(0, 2), (3, 1)]),
        ];
        v.sort();
        let names: Vec<String> = v.iter().map(|m| format!("{m:?}")).collect();
        assert_eq!(names, ["u5", "u0^2*u3", "u0*u1*u2", "u1^3"]);
    }
}
