//! Deformation fields `∂_t Z = v ∂_s Z` on loops: the isometric lift
//! `ℓ(f) = ℓ_r⁰(f) + i f`, the operators `Ω_I`, `Ω_II`, the isoenergy test and
//! the pairings `⟨u, v⟩_ℓ`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::loopgeom::{CurvatureField, Tolerances};
use crate::scalar::{lit, sup_diff, sup_norm, to_f64, Real};
use crate::spectral::Grid;

/// Complex velocity `v = vr + i·vi` on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationField<T: Real> {
    pub vr: Vec<T>,
    pub vi: Vec<T>,
}

impl<T: Real> DeformationField<T> {
    pub fn new(grid: &Grid<T>, vr: Vec<T>, vi: Vec<T>) -> Result<Self> {
        grid.check_len(vr.len())?;
        grid.check_len(vi.len())?;
        Ok(Self { vr, vi })
    }

    pub fn zero(grid: &Grid<T>) -> Self {
        Self {
            vr: vec![T::zero(); grid.len()],
            vi: vec![T::zero(); grid.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.vr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vr.is_empty()
    }

    pub fn to_complex(&self) -> Vec<Complex<T>> {
        self.vr
            .iter()
            .zip(&self.vi)
            .map(|(&r, &i)| Complex::new(r, i))
            .collect()
    }

    /// `−vi + i·vr`, a partner with `⟨v, probe⟩_ℓ = ½∫|v|²k^ℓ ds`.
    pub fn nondegeneracy_probe(&self) -> Self {
        Self {
            vr: self.vi.iter().map(|&x| -x).collect(),
            vi: self.vr.clone(),
        }
    }

    pub fn add_scaled(&self, other: &Self, c: T) -> Self {
        Self {
            vr: self.vr.iter().zip(&other.vr).map(|(a, b)| *a + c * *b).collect(),
            vi: self.vi.iter().zip(&other.vi).map(|(a, b)| *a + c * *b).collect(),
        }
    }
}

fn ha0_check<T: Real>(grid: &Grid<T>, kvi: &[T], tol: &Tolerances) -> Result<()> {
    let mean = grid.mean(kvi);
    let bound = tol.mean * to_f64(T::one().max(sup_norm(kvi)));
    if to_f64(mean.abs()) > bound || !mean.is_finite() {
        return Err(Error::NotInHA0 {
            mean: to_f64(mean),
            tol: bound,
        });
    }
    Ok(())
}

/// The zero-mean solution `vr` of `∂_s vr = k·vi`.
pub fn ell_r0<T: Real>(k: &CurvatureField<T>, vi: &[T], tol: &Tolerances) -> Result<Vec<T>> {
    let grid = k.grid();
    grid.check_len(vi.len())?;
    let kvi = grid.mul(k.values(), vi);
    ha0_check(grid, &kvi, tol)?;
    Ok(grid.antiderivative_of_fluctuation(&kvi))
}

/// The isometric deformation `ℓ_r⁰(vi) + i·vi`.
pub fn ell<T: Real>(
    k: &CurvatureField<T>,
    vi: &[T],
    tol: &Tolerances,
) -> Result<DeformationField<T>> {
    Ok(DeformationField {
        vr: ell_r0(k, vi, tol)?,
        vi: vi.to_vec(),
    })
}

fn omega2_unchecked<T: Real>(k: &CurvatureField<T>, vi: &[T], vr: &[T]) -> Vec<T> {
    let grid = k.grid();
    let mut spec = grid.forward(vi);
    grid.dealias_spec(&mut spec);
    grid.drop_roundoff(&mut spec);
    let mut prod = grid.forward(&grid.mul(k.values(), vr));
    grid.drop_roundoff(&mut prod);
    for (i, c) in prod.iter_mut().enumerate() {
        *c += spec[i] * grid_ik(grid, i);
    }
    grid.inverse(&grid.derivative_spec(&prod, 1))
}

fn grid_ik<T: Real>(grid: &Grid<T>, idx: usize) -> Complex<T> {
    if idx == grid.len() / 2 {
        Complex::new(T::zero(), T::zero())
    } else {
        Complex::new(T::zero(), lit(grid.wavenumber(idx) as f64))
    }
}

/// `Ω_II vi = ∂_s² vi + ∂_s(k·∂_s⁻¹(k·vi))` with the zero-mean
/// antiderivative.
pub fn omega2_numeric<T: Real>(
    k: &CurvatureField<T>,
    vi: &[T],
    tol: &Tolerances,
) -> Result<Vec<T>> {
    let vr = ell_r0(k, vi, tol)?;
    Ok(omega2_unchecked(k, vi, &vr))
}

fn require_floor<T: Real>(k: &CurvatureField<T>, tol: &Tolerances) -> Result<()> {
    let m = to_f64(k.min_abs());
    if m < tol.k_floor {
        return Err(Error::CurvatureVanishes {
            min_abs: m,
            floor: tol.k_floor,
        });
    }
    Ok(())
}

/// `Ω_I vr = ∂_s(∂_s(k⁻¹ ∂_s vr) + k·vr)`.
pub fn omega1_numeric<T: Real>(
    k: &CurvatureField<T>,
    vr: &[T],
    tol: &Tolerances,
) -> Result<Vec<T>> {
    require_floor(k, tol)?;
    let grid = k.grid();
    grid.check_len(vr.len())?;
    let dvr = grid.inverse(&grid.derivative_spec(&grid.forward(vr), 1));
    let inv_k: Vec<T> = k.values().iter().map(|&x| T::one() / x).collect();
    let q = grid.mul(&inv_k, &dvr);
    let inner: Vec<T> = grid
        .inverse(&grid.derivative_spec(&grid.forward(&q), 1))
        .into_iter()
        .zip(grid.mul(k.values(), vr))
        .map(|(a, b)| a + b)
        .collect();
    Ok(grid.inverse(&grid.derivative_spec(&grid.forward(&inner), 1)))
}

/// Residuals of the two isometry conditions `k·vi = ∂_s vr` (`rc2`) and
/// `Ω_I vr = Ω_II vi` (`rc1`, absent when `k` comes too close to zero).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsometryResiduals<T> {
    pub rc2: T,
    pub rc1: Option<T>,
}

pub fn isometry_residuals<T: Real>(
    k: &CurvatureField<T>,
    v: &DeformationField<T>,
    tol: &Tolerances,
) -> Result<IsometryResiduals<T>> {
    let grid = k.grid();
    grid.check_len(v.len())?;
    let kvi = grid.mul(k.values(), &v.vi);
    let dvr = grid.inverse(&grid.derivative_spec(&grid.forward(&v.vr), 1));
    let rc2 = sup_diff(&kvi, &dvr);
    let rc1 = match omega1_numeric(k, &v.vr, tol) {
        Ok(o1) => {
            let vr0 = grid.antiderivative_of_fluctuation(&kvi);
            Some(sup_diff(&o1, &omega2_unchecked(k, &v.vi, &vr0)))
        }
        Err(Error::CurvatureVanishes { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(IsometryResiduals { rc2, rc1 })
}

/// `|∮ k·dk ds|`, which vanishes exactly for energy-preserving variations.
pub fn isoenergy_test<T: Real>(k: &CurvatureField<T>, dk: &[T]) -> Result<T> {
    let grid = k.grid();
    grid.check_len(dk.len())?;
    let prod: Vec<T> = k.values().iter().zip(dk).map(|(a, b)| *a * *b).collect();
    Ok(grid.integral(&prod).abs())
}

/// `⟨u, v⟩_ℓ = ½∮(u^r v^i − u^i v^r) k^ℓ ds`.
pub fn pairing<T: Real>(
    u: &DeformationField<T>,
    v: &DeformationField<T>,
    k: &CurvatureField<T>,
    l: u32,
) -> Result<T> {
    let grid = k.grid();
    grid.check_len(u.len())?;
    grid.check_len(v.len())?;
    let half: T = lit(0.5);
    let integrand: Vec<T> = (0..grid.len())
        .map(|i| {
            (u.vr[i] * v.vi[i] - u.vi[i] * v.vr[i]) * k.values()[i].powi(l as i32) * half
        })
        .collect();
    Ok(grid.integral(&integrand))
}

/// `½∮k^{ℓ−1}(u^r ∂_s v^r − v^r ∂_s u^r) ds`, which equals [`pairing`]
/// whenever both fields are isometric.
pub fn pairing_isometric_form<T: Real>(
    u: &DeformationField<T>,
    v: &DeformationField<T>,
    k: &CurvatureField<T>,
    l: u32,
) -> Result<T> {
    let grid = k.grid();
    grid.check_len(u.len())?;
    grid.check_len(v.len())?;
    if l == 0 {
        require_floor(k, &Tolerances::default())?;
    }
    let du = grid.inverse(&grid.derivative_spec(&grid.forward(&u.vr), 1));
    let dv = grid.inverse(&grid.derivative_spec(&grid.forward(&v.vr), 1));
    let half: T = lit(0.5);
    let integrand: Vec<T> = (0..grid.len())
        .map(|i| {
            k.values()[i].powi(l as i32 - 1) * (u.vr[i] * dv[i] - v.vr[i] * du[i]) * half
        })
        .collect();
    Ok(grid.integral(&integrand))
}

/// `∂_t ψ = −½(∂_s v)ψ + v ∂_s ψ`, the induced variation of a solution of
/// the Schrödinger problem attached to the loop.
pub fn kdv_potential_deformation<T: Real>(
    k: &CurvatureField<T>,
    v: &DeformationField<T>,
    psi: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let grid = k.grid();
    grid.check_len(v.len())?;
    grid.check_len(psi.len())?;
    let vc = v.to_complex();
    let dv = grid.derivative_c(&vc, 1);
    let dpsi = grid.derivative_c(psi, 1);
    let half: T = lit(0.5);
    Ok((0..grid.len())
        .map(|i| vc[i] * dpsi[i] - dv[i] * psi[i] * half)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loopgeom::energy;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid() -> Grid<f64> {
        Grid::new(128).unwrap()
    }

    fn standard(g: &Grid<f64>) -> CurvatureField<f64> {
        CurvatureField::from_fourier(g, 1.0, &[0.0, 0.5], &[]).unwrap()
    }

    fn random_k(g: &Grid<f64>, rng: &mut ChaCha8Rng) -> CurvatureField<f64> {
        let cos: Vec<f64> = (0..5).map(|_| rng.gen_range(-0.15..0.15)).collect();
        let sin: Vec<f64> = (0..5).map(|_| rng.gen_range(-0.15..0.15)).collect();
        CurvatureField::from_fourier(g, 1.0, &cos, &sin).unwrap()
    }

    #[test]
    fn ell_r0_examples() {
        let g = grid();
        let tol = Tolerances::default();
        let k = standard(&g);
        let vr = ell_r0(&k, &k.derivative(1), &tol).unwrap();
        let c = energy(&k) / (2.0 * PI);
        let expect: Vec<f64> = k.values().iter().map(|x| x * x / 2.0 - c).collect();
        assert!(sup_diff(&vr, &expect) < 1e-13);

        let one = CurvatureField::constant(&g, 1.0);
        let zero = ell_r0(&one, &vec![0.0; 128], &tol).unwrap();
        assert!(sup_norm(&zero) == 0.0);
        assert!(matches!(
            ell_r0(&one, &vec![1.0; 128], &tol),
            Err(Error::NotInHA0 { .. })
        ));
    }

    #[test]
    fn ell_examples() {
        let g = grid();
        let tol = Tolerances::default();
        let one = CurvatureField::constant(&g, 1.0);
        let v = ell(&one, &one.derivative(1), &tol).unwrap();
        assert!(sup_norm(&v.vr) < 1e-15 && sup_norm(&v.vi) < 1e-15);
        let k = standard(&g);
        let v = ell(&k, &k.derivative(1), &tol).unwrap();
        assert!(sup_diff(&v.vi, &g.sample(|s| -(2.0 * s).sin())) < 1e-13);
    }

    #[test]
    fn omega_examples() {
        let g = grid();
        let tol = Tolerances::default();
        let one = CurvatureField::constant(&g, 1.0);
        let o2 = omega2_numeric(&one, &g.sample(|s| (2.0 * s).sin()), &tol).unwrap();
        assert!(sup_diff(&o2, &g.sample(|s| -3.0 * (2.0 * s).sin())) < 1e-12);
        assert!(sup_norm(&omega2_numeric(&one, &vec![0.0; 128], &tol).unwrap()) == 0.0);
        let o1 = omega1_numeric(&one, &g.sample(|s| (2.0 * s).cos()), &tol).unwrap();
        assert!(sup_diff(&o1, &g.sample(|s| 6.0 * (2.0 * s).sin())) < 1e-10);
        assert!(sup_norm(&omega1_numeric(&one, &vec![0.0; 128], &tol).unwrap()) == 0.0);
        let crossing = CurvatureField::from_fourier(&g, 0.0, &[1.0], &[]).unwrap();
        assert!(matches!(
            omega1_numeric(&crossing, &vec![0.0; 128], &tol),
            Err(Error::CurvatureVanishes { .. })
        ));
    }

    #[test]
    fn isometry_of_lifted_fields() {
        let g = grid();
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let k = random_k(&g, &mut rng);
            let v = ell(&k, &k.derivative(1), &tol).unwrap();
            let r = isometry_residuals(&k, &v, &tol).unwrap();
            assert!(r.rc2 <= 1e-9 && r.rc1.unwrap() <= 1e-6, "{r:?}");

            let bogus = DeformationField::new(
                &g,
                g.sample(|s| (3.0 * s).cos() + 0.2),
                g.sample(|s| (5.0 * s).sin()),
            )
            .unwrap();
            assert!(isometry_residuals(&k, &bogus, &tol).unwrap().rc2 > 0.1);
        }
        let one = CurvatureField::constant(&g, 1.0);
        let constant = DeformationField::new(&g, vec![0.4; 128], vec![0.0; 128]).unwrap();
        let r = isometry_residuals(&one, &constant, &tol).unwrap();
        assert!(r.rc2 < 1e-15 && r.rc1.unwrap() < 1e-14);
        let crossing = CurvatureField::from_fourier(&g, 0.0, &[1.0], &[]).unwrap();
        assert!(isometry_residuals(&crossing, &constant, &tol).unwrap().rc1.is_none());
    }

    #[test]
    fn isoenergy_examples() {
        let g = grid();
        let k = standard(&g);
        let k2 = crate::hierarchy::flow(2).unwrap().rhs.evaluate(&k.jets(3));
        assert!(isoenergy_test(&k, &k2).unwrap() <= 1e-10);
        let self_test = isoenergy_test(&k, k.values()).unwrap();
        assert!((self_test - 2.0 * energy(&k)).abs() < 1e-12);
        assert!(isoenergy_test(&k, &k.derivative(1)).unwrap() < 1e-14);
    }

    #[test]
    fn pairing_properties() {
        let g = grid();
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let k = random_k(&g, &mut rng);
        let field = |rng: &mut ChaCha8Rng| {
            let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            DeformationField::new(
                &g,
                g.sample(|s| a * (2.0 * s).cos() + b),
                g.sample(|s| c * (3.0 * s).sin() + a * s.cos()),
            )
            .unwrap()
        };
        for l in 0..4 {
            let (u, v, w) = (field(&mut rng), field(&mut rng), field(&mut rng));
            assert!(pairing(&v, &v, &k, l).unwrap().abs() < 1e-14);
            let uv = pairing(&u, &v, &k, l).unwrap();
            assert!((uv + pairing(&v, &u, &k, l).unwrap()).abs() < 1e-13);
            let lhs = pairing(&u, &v.add_scaled(&w, 0.7), &k, l).unwrap();
            let rhs = uv + 0.7 * pairing(&u, &w, &k, l).unwrap();
            assert!((lhs - rhs).abs() < 1e-13);
            let probe = u.nondegeneracy_probe();
            assert!(pairing(&u, &probe, &k, l).unwrap() > 1e-3);
        }
        let u = ell(&k, &k.derivative(1), &tol).unwrap();
        let vi = g.mul(k.values(), &g.sample(|s| (2.0 * s).sin()));
        let vi: Vec<f64> = {
            let m = g.mean(&g.mul(k.values(), &vi)) / g.mean(&g.mul(k.values(), k.values()));
            vi.iter().zip(k.values()).map(|(a, b)| a - m * b).collect()
        };
        let v = ell(&k, &vi, &tol).unwrap();
        for l in 0..4 {
            let direct = pairing(&u, &v, &k, l).unwrap();
            let iso = pairing_isometric_form(&u, &v, &k, l).unwrap();
            assert!((direct - iso).abs() <= 1e-8, "l = {l}: {direct} vs {iso}");
        }
    }

    #[test]
    fn kdv_potential_examples() {
        let g = grid();
        let one = CurvatureField::constant(&g, 1.0);
        let psi: Vec<Complex<f64>> =
            g.nodes().iter().map(|&s| Complex::from_polar(1.0, 3.0 * s)).collect();
        let dpsi = g.derivative_c(&psi, 1);
        let zero = kdv_potential_deformation(&one, &DeformationField::zero(&g), &psi).unwrap();
        assert!(zero.iter().all(|c| c.norm() == 0.0));
        let c = DeformationField::new(&g, vec![0.3; 128], vec![-0.2; 128]).unwrap();
        let out = kdv_potential_deformation(&one, &c, &psi).unwrap();
        for i in 0..128 {
            assert!((out[i] - Complex::new(0.3, -0.2) * dpsi[i]).norm() < 1e-12);
        }
        let v = DeformationField::new(&g, vec![0.5; 128], one.derivative(1)).unwrap();
        let out = kdv_potential_deformation(&one, &v, &psi).unwrap();
        for i in 0..128 {
            assert!((out[i] - dpsi[i] * 0.5).norm() < 1e-12);
        }
    }
}
