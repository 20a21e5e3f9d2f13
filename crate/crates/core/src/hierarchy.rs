//! The mKdV hierarchy built from the recursion operator
//! `Ω_II = D_s² + D_s u_0 D_s⁻¹ u_0`, together with the Miura bridge to KdV
//! and the filtration residuals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jetalg::{format, rat, DiffPoly};

/// `Ω_II P = D_s² P + D_s(u_0 · D_s⁻¹(u_0 P))`.
pub fn omega2_symbolic(p: &DiffPoly) -> Result<DiffPoly> {
    omega2_with_certificate(p).map(|(q, _)| q)
}

/// Like [`omega2_symbolic`], also returning the antiderivative
/// `D_s⁻¹(u_0 P)` that witnesses exactness.
pub fn omega2_with_certificate(p: &DiffPoly) -> Result<(DiffPoly, DiffPoly)> {
    let u0 = DiffPoly::u(0);
    let cert = (&u0 * p).antiderivative()?;
    let out = p.total_derivative_n(2) + (&u0 * &cert).total_derivative();
    Ok((out, cert))
}

/// One member `∂_{t_n} k = K_n` of the hierarchy.
#[derive(Clone, Debug, PartialEq)]
pub struct HierarchyFlow {
    pub index: usize,
    pub rhs: DiffPoly,
    /// `D_s⁻¹(u_0 K_{n−1})`, the antiderivative used to produce `K_n`;
    /// `None` for the seed `K_1 = u_1`.
    pub certificate: Option<DiffPoly>,
}

/// An explicitly built prefix `K_1, …, K_{n_max}` of the hierarchy.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    flows: Vec<HierarchyFlow>,
}

impl Hierarchy {
    pub fn build(n_max: usize) -> Result<Self> {
        let mut h = Self { flows: Vec::new() };
        h.extend_to(n_max)?;
        Ok(h)
    }

    fn extend_to(&mut self, n_max: usize) -> Result<()> {
        if self.flows.is_empty() && n_max >= 1 {
            self.flows.push(HierarchyFlow {
                index: 1,
                rhs: DiffPoly::u(1),
                certificate: None,
            });
        }
        while self.flows.len() < n_max {
            let prev = &self.flows.last().expect("seeded").rhs;
            let (rhs, cert) = omega2_with_certificate(prev)?;
            self.flows.push(HierarchyFlow {
                index: self.flows.len() + 1,
                rhs,
                certificate: Some(cert),
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn flows(&self) -> &[HierarchyFlow] {
        &self.flows
    }

    pub fn get(&self, n: usize) -> Option<&HierarchyFlow> {
        n.checked_sub(1).and_then(|i| self.flows.get(i))
    }
}

fn cache() -> &'static Mutex<Hierarchy> {
    static CACHE: OnceLock<Mutex<Hierarchy>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Hierarchy { flows: Vec::new() }))
}

/// `K_n` from a process-wide cache that is extended on demand.
pub fn flow(n: usize) -> Result<HierarchyFlow> {
    if n == 0 {
        return Err(Error::InvalidInput("flow index must be at least 1".into()));
    }
    let mut h = cache().lock().unwrap_or_else(|e| e.into_inner());
    h.extend_to(n)?;
    Ok(h.flows[n - 1].clone())
}

/// `[K_i, K_j]`, which vanishes for commuting flows.
pub fn check_commute(i: usize, j: usize) -> Result<DiffPoly> {
    Ok(flow(i)?.rhs.lie_bracket(&flow(j)?.rhs))
}

/// Residual defining the implemented filtration level `g`: `K_{g+1}`.
pub fn filtration_residual(g: usize) -> Result<DiffPoly> {
    Ok(flow(g + 1)?.rhs)
}

/// A differential polynomial with Gaussian-rational coefficients, stored as
/// real and imaginary parts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComplexDiffPoly {
    pub re: DiffPoly,
    pub im: DiffPoly,
}

impl ComplexDiffPoly {
    pub fn new(re: DiffPoly, im: DiffPoly) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.re.scale(c), self.im.scale(c))
    }

    pub fn total_derivative(&self) -> Self {
        Self::new(self.re.total_derivative(), self.im.total_derivative())
    }

    pub fn total_derivative_n(&self, order: usize) -> Self {
        Self::new(
            self.re.total_derivative_n(order),
            self.im.total_derivative_n(order),
        )
    }

    /// Variation under the real flow `∂_t k = q`.
    pub fn frechet(&self, q: &DiffPoly) -> Self {
        Self::new(self.re.frechet(q), self.im.frechet(q))
    }

    pub fn to_latex(&self) -> String {
        format!(
            "\\left({}\\right) + i\\left({}\\right)",
            format::to_latex(&self.re),
            format::to_latex(&self.im)
        )
    }
}

impl fmt::Display for ComplexDiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + i*({})", self.re, self.im)
    }
}

impl Add for &ComplexDiffPoly {
    type Output = ComplexDiffPoly;
    fn add(self, rhs: &ComplexDiffPoly) -> ComplexDiffPoly {
        ComplexDiffPoly::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &ComplexDiffPoly {
    type Output = ComplexDiffPoly;
    fn sub(self, rhs: &ComplexDiffPoly) -> ComplexDiffPoly {
        ComplexDiffPoly::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Neg for &ComplexDiffPoly {
    type Output = ComplexDiffPoly;
    fn neg(self) -> ComplexDiffPoly {
        ComplexDiffPoly::new(-&self.re, -&self.im)
    }
}

impl Mul for &ComplexDiffPoly {
    type Output = ComplexDiffPoly;
    fn mul(self, rhs: &ComplexDiffPoly) -> ComplexDiffPoly {
        ComplexDiffPoly::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

/// Miura substitution `u = ¼u_0² ± i·½u_1`.
pub fn miura(sign: i32) -> ComplexDiffPoly {
    let s = if sign < 0 { -1 } else { 1 };
    ComplexDiffPoly::new(
        (&DiffPoly::u(0) * &DiffPoly::u(0)).scale(&rat(1, 4)),
        DiffPoly::u(1).scale(&rat(s, 2)),
    )
}

/// Result of matching `∂_t u = α·u·D_s u + β·D_s³u` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct KdvBridge {
    pub alpha: BigRational,
    pub beta: BigRational,
    pub residual: ComplexDiffPoly,
}

/// Pushes the Miura image of the mKdV flow `K_2` forward and identifies the
/// KdV constants.
pub fn kdv_bridge_check() -> Result<KdvBridge> {
    kdv_bridge_check_with(&flow(2)?.rhs)
}

/// Same as [`kdv_bridge_check`] for an arbitrary real flow `∂_t k = rhs`.
pub fn kdv_bridge_check_with(rhs: &DiffPoly) -> Result<KdvBridge> {
    let u = miura(1);
    let target = u.frechet(rhs);
    let nonlinear = &u * &u.total_derivative();
    let dispersive = u.total_derivative_n(3);

    let mut rows: Vec<[BigRational; 3]> = Vec::new();
    for (t, a, b) in [
        (&target.re, &nonlinear.re, &dispersive.re),
        (&target.im, &nonlinear.im, &dispersive.im),
    ] {
        let mut monos: Vec<_> = t.terms().map(|(m, _)| m.clone()).collect();
        monos.extend(a.terms().map(|(m, _)| m.clone()));
        monos.extend(b.terms().map(|(m, _)| m.clone()));
        monos.sort();
        monos.dedup();
        rows.extend(
            monos
                .iter()
                .map(|m| [a.coefficient(m), b.coefficient(m), t.coefficient(m)]),
        );
    }
    let [alpha, beta] = solve_exact_2(rows)?;
    let fitted = &nonlinear.scale(&alpha) + &dispersive.scale(&beta);
    let residual = &target - &fitted;
    if !residual.is_zero() {
        return Err(Error::NoSolution(format!(
            "least residual {residual} is not zero"
        )));
    }
    Ok(KdvBridge {
        alpha,
        beta,
        residual,
    })
}

/// Exact Gaussian elimination for the overdetermined system
/// `a_i·x + b_i·y = c_i`; requires a unique consistent solution.
fn solve_exact_2(mut rows: Vec<[BigRational; 3]>) -> Result<[BigRational; 2]> {
    let mut rank = 0;
    for col in 0..2 {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = BigRational::one() / rows[rank][col].clone();
        for v in rows[rank].iter_mut() {
            *v *= &inv;
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    *v -= &f * pv;
                }
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|r| !r[2].is_zero()) {
        return Err(Error::NoSolution("inconsistent linear system".into()));
    }
    if rank < 2 {
        return Err(Error::NoSolution(format!(
            "underdetermined: rank {rank} of 2"
        )));
    }
    Ok([rows[0][2].clone(), rows[1][2].clone()])
}

/// Coefficients `β_j` of the flow obtained from `n − 1` numeric
/// applications of `Ω_II` with the zero-mean antiderivative, as a
/// combination `Σ_j β_j K_j`.
///
/// `means[j − 1]` must hold the mean over the loop of
/// `D_s⁻¹(u_0 K_j)`, the certificate stored with `K_{j+1}`.
pub fn zero_mean_gauge<T>(n: usize, means: &[T]) -> Vec<T>
where
    T: Copy + num_traits::Zero + num_traits::One + std::ops::Sub<Output = T> + Mul<Output = T>,
{
    let mut beta = vec![T::zero(); n];
    if n == 0 {
        return beta;
    }
    beta[0] = T::one();
    for step in 1..n {
        let shift: T = (0..step).fold(T::zero(), |acc, j| acc + beta[j] * means[j]);
        for j in (1..=step).rev() {
            beta[j] = beta[j - 1];
        }
        beta[0] = T::zero() - shift;
    }
    beta
}
