use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::scalar::Real;

/// Order of a Sobolev norm; `-1` is the dual norm `H^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SobolevIndex(i32);

impl SobolevIndex {
    pub const H_MINUS_1: Self = Self(-1);
    pub const L2: Self = Self(0);
    pub const H1: Self = Self(1);
    pub const H2: Self = Self(2);

    pub fn new(s: i32) -> Result<Self> {
        if s < -1 {
            return Err(Error::param("s", format!("Sobolev order must be >= -1, got {s}")));
        }
        Ok(Self(s))
    }

    pub fn order(self) -> i32 {
        self.0
    }

    /// Index one order higher.
    pub fn raised(self) -> Self {
        Self(self.0 + 1)
    }
}

/// Real-valued periodic scalar field stored as Fourier-series coefficients.
///
/// `f(x) = Σ_k coeff(k) e^{2πi k·x}`, so `coeff(0)` is the mean and
/// Parseval reads `Σ|coeff|² = mean(f²)` without extra factors.
#[derive(Clone, Debug)]
pub struct SpectralField<T: Real> {
    grid: TorusGrid<T>,
    coeff: Vec<Complex<T>>,
}

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(grid: &TorusGrid<T>) -> Self {
        Self {
            grid: grid.clone(),
            coeff: vec![czero(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: &TorusGrid<T>, coeff: Vec<Complex<T>>) -> Result<Self> {
        if coeff.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: coeff.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            coeff,
        })
    }

    /// Field from row-major physical samples.
    pub fn from_physical(grid: &TorusGrid<T>, samples: &[T]) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: samples.len(),
            });
        }
        let mut data: Vec<Complex<T>> = samples.iter().map(|&s| Complex::new(s, T::zero())).collect();
        grid.native_plan().forward(&mut data);
        Ok(Self {
            grid: grid.clone(),
            coeff: data,
        })
    }

    /// Samples `f(x, y)` at the grid points and transforms.
    pub fn from_fn(grid: &TorusGrid<T>, f: impl Fn(T, T) -> T) -> Self {
        let n = grid.n();
        let mut samples = Vec::with_capacity(grid.len());
        for iy in 0..n {
            for ix in 0..n {
                let (x, y) = grid.point(ix, iy);
                samples.push(f(x, y));
            }
        }
        Self::from_physical(grid, &samples).expect("sample count matches grid")
    }

    /// Constant field.
    pub fn constant(grid: &TorusGrid<T>, c: T) -> Self {
        let mut f = Self::zeros(grid);
        f.coeff[0] = Complex::new(c, T::zero());
        f
    }

    /// Row-major physical samples.
    pub fn to_physical(&self) -> Vec<T> {
        let mut data = self.coeff.clone();
        self.grid.native_plan().inverse(&mut data);
        data.into_iter().map(|c| c.re).collect()
    }

    /// Samples on the `2n` grid; exact quadrature for integrands of degree
    /// up to four in the field.
    pub fn to_physical_doubled(&self) -> Vec<T> {
        let plan = self.grid.doubled_plan();
        let mut data = embed(&self.grid, &self.coeff, plan.size());
        plan.inverse(&mut data);
        data.into_iter().map(|c| c.re).collect()
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeff
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeff
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeff
    }

    /// Coefficient of wavenumber `(kx, ky)` (indices wrap modulo `n`).
    pub fn coeff(&self, kx: i64, ky: i64) -> Complex<T> {
        self.coeff[self.grid.index_of(kx, ky)]
    }

    pub fn set_coeff(&mut self, kx: i64, ky: i64, value: Complex<T>) {
        let i = self.grid.index_of(kx, ky);
        self.coeff[i] = value;
    }

    pub fn mean(&self) -> T {
        self.coeff[0].re
    }

    pub fn remove_mean(&mut self) {
        self.coeff[0] = czero();
    }

    pub fn max_coeff_abs(&self) -> T {
        self.coeff.iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.iter().all(|c| c.re == T::zero() && c.im == T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.coeff.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest `|coeff(k) - conj(coeff(-k))|`.
    pub fn hermitian_defect(&self) -> T {
        let n = self.grid.n();
        let mut worst = T::zero();
        for iy in 0..n {
            for ix in 0..n {
                let a = self.coeff[iy * n + ix];
                let b = self.coeff[self.grid.conjugate_index(ix, iy)];
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst
    }

    /// Largest Euclidean `|k|` carrying a coefficient above `tol`.
    pub fn max_active_wavenumber(&self, tol: T) -> T {
        let mut kmax = T::zero();
        for (i, kx, ky) in self.grid.modes() {
            if self.coeff[i].norm() > tol {
                let k = T::from_i64_lossy(kx * kx + ky * ky).sqrt();
                kmax = kmax.max(k);
            }
        }
        kmax
    }

    /// Applies a real Fourier multiplier `m(kx, ky)` built on derivative
    /// wavenumbers.
    pub fn apply_multiplier(&self, m: impl Fn(i64, i64) -> T) -> Self {
        let mut out = self.clone();
        for (i, kx, ky) in self.grid.derivative_modes() {
            out.coeff[i] = out.coeff[i] * m(kx, ky);
        }
        out
    }

    /// Applies a complex multiplier built on derivative wavenumbers.
    pub fn apply_complex_multiplier(&self, m: impl Fn(i64, i64) -> Complex<T>) -> Self {
        let mut out = self.clone();
        for (i, kx, ky) in self.grid.derivative_modes() {
            out.coeff[i] = out.coeff[i] * m(kx, ky);
        }
        out
    }

    /// `∂/∂x`: multiplier `2πi kx`.
    pub fn dx(&self) -> Self {
        let tp = T::two_pi();
        self.apply_complex_multiplier(|kx, _| Complex::new(T::zero(), tp * T::from_i64_lossy(kx)))
    }

    /// `∂/∂y`: multiplier `2πi ky`.
    pub fn dy(&self) -> Self {
        let tp = T::two_pi();
        self.apply_complex_multiplier(|_, ky| Complex::new(T::zero(), tp * T::from_i64_lossy(ky)))
    }

    /// Multiplier `-4π²|k|²`.
    pub fn laplacian(&self) -> Self {
        let c = -T::two_pi() * T::two_pi();
        self.apply_multiplier(|kx, ky| c * T::from_i64_lossy(kx * kx + ky * ky))
    }

    /// Zero-mean solution of `Δψ = f`; the mean of `f` is ignored.
    pub fn inverse_laplacian(&self) -> Self {
        let c = -T::two_pi() * T::two_pi();
        self.apply_multiplier(|kx, ky| {
            let k2 = kx * kx + ky * ky;
            if k2 == 0 {
                T::zero()
            } else {
                T::one() / (c * T::from_i64_lossy(k2))
            }
        })
    }

    /// `exp(-4π² rate |k|² t)`, the heat semigroup.
    pub fn heat_flow(&self, rate_times_t: T) -> Self {
        let c = -T::two_pi() * T::two_pi() * rate_times_t;
        self.apply_multiplier(|kx, ky| (c * T::from_i64_lossy(kx * kx + ky * ky)).exp())
    }

    /// `L²` inner product `∫ f g` (real parts by Parseval).
    pub fn inner(&self, other: &Self) -> T {
        debug_assert!(self.grid.same_as(&other.grid));
        self.coeff
            .iter()
            .zip(&other.coeff)
            .fold(T::zero(), |acc, (a, b)| acc + a.re * b.re + a.im * b.im)
    }

    /// Sum of `(1 + 4π²|k|²)^s |coeff(k)|²`.
    pub fn sobolev_norm_sq(&self, s: SobolevIndex) -> T {
        let tp2 = T::two_pi() * T::two_pi();
        let order = s.order();
        let mut acc = T::zero();
        for (i, kx, ky) in self.grid.derivative_modes() {
            let w = T::one() + tp2 * T::from_i64_lossy(kx * kx + ky * ky);
            acc = acc + w.powi(order) * self.coeff[i].norm_sqr();
        }
        acc
    }

    pub fn sobolev_norm(&self, s: SobolevIndex) -> T {
        self.sobolev_norm_sq(s).sqrt()
    }

    pub fn l2_norm(&self) -> T {
        self.coeff.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr()).sqrt()
    }

    /// `‖∇f‖²_{L²}`, i.e. `Σ 4π²|k|² |coeff|²`.
    pub fn gradient_norm_sq(&self) -> T {
        let tp2 = T::two_pi() * T::two_pi();
        let mut acc = T::zero();
        for (i, kx, ky) in self.grid.derivative_modes() {
            acc = acc + tp2 * T::from_i64_lossy(kx * kx + ky * ky) * self.coeff[i].norm_sqr();
        }
        acc
    }

    /// `L^p` norm by midpoint quadrature on the native samples.
    pub fn lp_norm(&self, p: T) -> T {
        lp_norm_of_samples(&self.to_physical(), p)
    }

    /// `L⁴` norm by quadrature on the `2n` grid, exact for the trigonometric
    /// polynomial the field represents.
    pub fn l4_norm_exact(&self) -> T {
        let s = self.to_physical_doubled();
        let m = T::from_usize_lossy(s.len());
        let sum = s.iter().fold(T::zero(), |acc, &v| acc + (v * v) * (v * v));
        (sum / m).sqrt().sqrt()
    }

    /// `‖f‖_{L^∞}` over the native samples.
    pub fn max_abs(&self) -> T {
        self.to_physical().into_iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, a: T) -> Self {
        let mut out = self.clone();
        for c in out.coeff.iter_mut() {
            *c = *c * a;
        }
        out
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: T, other: &Self) {
        debug_assert!(self.grid.same_as(&other.grid));
        for (c, o) in self.coeff.iter_mut().zip(&other.coeff) {
            *c = *c + *o * a;
        }
    }

    /// Zeros every coefficient with `|k| > kappa` (Euclidean).
    pub fn band_limited(&self, kappa: T) -> Self {
        let mut out = self.clone();
        let k2max = kappa * kappa;
        for (i, kx, ky) in self.grid.modes() {
            if T::from_i64_lossy(kx * kx + ky * ky) > k2max {
                out.coeff[i] = czero();
            }
        }
        out
    }

    /// Copy with the Nyquist row and column zeroed.
    pub fn without_nyquist(&self) -> Self {
        let mut out = self.clone();
        zero_nyquist(&self.grid, &mut out.coeff);
        out
    }

    /// Spectral resampling onto another grid: shared wavenumbers are copied,
    /// the rest are zero. Nyquist modes are dropped.
    pub fn resampled(&self, target: &TorusGrid<T>) -> Self {
        let mut out = Self::zeros(target);
        let h = (self.grid.n().min(target.n()) / 2) as i64;
        for (i, kx, ky) in self.grid.modes() {
            if kx.abs() < h && ky.abs() < h {
                let j = target.index_of(kx, ky);
                out.coeff[j] = self.coeff[i];
            }
        }
        out
    }
}

pub(crate) fn lp_norm_of_samples<T: Real>(samples: &[T], p: T) -> T {
    let m = T::from_usize_lossy(samples.len());
    let sum = samples.iter().fold(T::zero(), |acc, &v| acc + v.abs().powf(p));
    (sum / m).powf(T::one() / p)
}

pub(crate) fn zero_nyquist<T: Real>(grid: &TorusGrid<T>, coeff: &mut [Complex<T>]) {
    let n = grid.n();
    let h = n / 2;
    for j in 0..n {
        coeff[h * n + j] = czero();
        coeff[j * n + h] = czero();
    }
}

/// Places native coefficients into an `m × m` array by wavenumber.
pub(crate) fn embed<T: Real>(grid: &TorusGrid<T>, coeff: &[Complex<T>], m: usize) -> Vec<Complex<T>> {
    let n = grid.n();
    let mut out = vec![czero(); m * m];
    for iy in 0..n {
        let ky = grid.wavenumber(iy);
        let jy = ky.rem_euclid(m as i64) as usize;
        for ix in 0..n {
            let kx = grid.wavenumber(ix);
            let jx = kx.rem_euclid(m as i64) as usize;
            out[jy * m + jx] = coeff[iy * n + ix];
        }
    }
    out
}

/// Inverse of [`embed`]: keeps the native wavenumbers, drops Nyquist.
pub(crate) fn truncate<T: Real>(grid: &TorusGrid<T>, padded: &[Complex<T>], m: usize) -> Vec<Complex<T>> {
    let n = grid.n();
    let mut out = vec![czero(); n * n];
    for iy in 0..n {
        let ky = grid.wavenumber(iy);
        let jy = ky.rem_euclid(m as i64) as usize;
        for ix in 0..n {
            let kx = grid.wavenumber(ix);
            let jx = kx.rem_euclid(m as i64) as usize;
            out[iy * n + ix] = padded[jy * m + jx];
        }
    }
    zero_nyquist(grid, &mut out);
    out
}

impl<T: Real> Add for &SpectralField<T> {
    type Output = SpectralField<T>;
    fn add(self, rhs: Self) -> SpectralField<T> {
        let mut out = self.clone();
        out.axpy(T::one(), rhs);
        out
    }
}

impl<T: Real> Sub for &SpectralField<T> {
    type Output = SpectralField<T>;
    fn sub(self, rhs: Self) -> SpectralField<T> {
        let mut out = self.clone();
        out.axpy(-T::one(), rhs);
        out
    }
}

impl<T: Real> Mul<T> for &SpectralField<T> {
    type Output = SpectralField<T>;
    fn mul(self, rhs: T) -> SpectralField<T> {
        self.scaled(rhs)
    }
}

impl<T: Real> Neg for &SpectralField<T> {
    type Output = SpectralField<T>;
    fn neg(self) -> SpectralField<T> {
        self.scaled(-T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn grid(n: usize) -> TorusGrid<f64> {
        TorusGrid::new(n).unwrap()
    }

    fn random_hermitian(g: &TorusGrid<f64>, seed: u64) -> SpectralField<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        SpectralField::from_physical(g, &samples).unwrap()
    }

    #[test]
    fn zero_field_round_trip() {
        let g = grid(8);
        let f = SpectralField::zeros(&g);
        assert!(f.to_physical().iter().all(|&v| v == 0.0));
        let back = SpectralField::from_physical(&g, &f.to_physical()).unwrap();
        assert!(back.is_zero());
    }

    #[test]
    fn half_coefficients_give_cosine() {
        let g = grid(16);
        let mut f = SpectralField::zeros(&g);
        f.set_coeff(1, 0, Complex::new(0.5, 0.0));
        f.set_coeff(-1, 0, Complex::new(0.5, 0.0));
        let s = f.to_physical();
        for iy in 0..16 {
            for ix in 0..16 {
                let (x, _) = g.point(ix, iy);
                assert!((s[iy * 16 + ix] - (TAU * x).cos()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn random_round_trip_and_parseval() {
        let g = grid(32);
        let f = random_hermitian(&g, 7);
        let s = f.to_physical();
        let back = SpectralField::from_physical(&g, &s).unwrap();
        let num: f64 = f.coeffs().iter().zip(back.coeffs()).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!(num.sqrt() / f.l2_norm() < 1e-12);
        let ms: f64 = s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64;
        assert!((ms - f.l2_norm().powi(2)).abs() < 1e-12 * ms);
        assert!(f.hermitian_defect() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = grid(8);
        assert!(matches!(
            SpectralField::from_physical(&g, &[0.0; 10]),
            Err(Error::DimensionMismatch { expected: 64, found: 10 })
        ));
        assert!(SpectralField::from_coeffs(&g, vec![czero(); 3]).is_err());
    }

    #[test]
    fn cosine_eigenfunction_and_norms() {
        let g = grid(16);
        let f = SpectralField::from_fn(&g, |x, _| (TAU * x).cos());
        let lap = f.laplacian();
        let expected = f.scaled(-4.0 * PI * PI);
        assert!((&lap - &expected).l2_norm() < 1e-12);
        assert!((f.l2_norm() - 0.5f64.sqrt()).abs() < 1e-14);
        let h1 = f.sobolev_norm(SobolevIndex::H1);
        assert!((h1 - ((1.0 + 4.0 * PI * PI) / 2.0).sqrt()).abs() < 1e-12);
        assert!((f.sobolev_norm(SobolevIndex::L2) - f.l2_norm()).abs() < 1e-15);
    }

    #[test]
    fn sobolev_norms_are_ordered() {
        let g = grid(32);
        for seed in 0..5 {
            let f = random_hermitian(&g, seed);
            let m1 = f.sobolev_norm(SobolevIndex::H_MINUS_1);
            let l2 = f.sobolev_norm(SobolevIndex::L2);
            let h1 = f.sobolev_norm(SobolevIndex::H1);
            assert!(m1 <= l2 && l2 <= h1);
        }
    }

    #[test]
    fn sobolev_index_rejects_below_minus_one() {
        assert!(SobolevIndex::new(-2).is_err());
        assert_eq!(SobolevIndex::new(3).unwrap().order(), 3);
    }

    #[test]
    fn exact_l4_of_product_of_sines() {
        let g = grid(16);
        let f = SpectralField::from_fn(&g, |x, y| (TAU * x).sin() * (TAU * y).sin());
        let l4 = f.l4_norm_exact();
        assert!((l4 - (9.0f64 / 64.0).powf(0.25)).abs() < 1e-14);
        assert!((f.lp_norm(4.0) - l4).abs() < 1e-14);
    }

    #[test]
    fn resampling_preserves_shared_modes() {
        let g = grid(16);
        let big = grid(32);
        let f = random_hermitian(&g, 3).without_nyquist();
        let up = f.resampled(&big);
        let down = up.resampled(&g);
        assert!((&down - &f).l2_norm() < 1e-15);
        assert!((up.l2_norm() - f.l2_norm()).abs() < 1e-15);
    }
}
