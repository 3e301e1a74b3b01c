use std::ops::{Add, Mul, Sub};

use super::product::Padded;
use super::spectral::{SobolevIndex, SpectralField};
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::scalar::Real;

/// Relative tolerance of the divergence-free check.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// Two-component periodic vector field.
///
/// `divergence_free` records that the field passed the divergence check
/// (or came out of an operator that guarantees it).
#[derive(Clone, Debug)]
pub struct VectorField<T: Real> {
    pub x: SpectralField<T>,
    pub y: SpectralField<T>,
    divergence_free: bool,
}

/// Which form of the quadratic transport term to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvectionForm {
    /// `(a·∇)b` from products of `a` with derivatives of `b`.
    Advective,
    /// `∇·(a⊗b)`; equal to the advective form only for solenoidal `a`.
    Divergence,
}

impl<T: Real> VectorField<T> {
    pub fn new(x: SpectralField<T>, y: SpectralField<T>) -> Result<Self> {
        x.grid().ensure_same(y.grid())?;
        Ok(Self {
            x,
            y,
            divergence_free: false,
        })
    }

    /// Builds the field and verifies the divergence-free invariant.
    pub fn solenoidal(x: SpectralField<T>, y: SpectralField<T>) -> Result<Self> {
        let mut v = Self::new(x, y)?;
        v.check_divergence_free()?;
        v.divergence_free = true;
        Ok(v)
    }

    pub(crate) fn assume_solenoidal(x: SpectralField<T>, y: SpectralField<T>) -> Self {
        debug_assert!(x.grid().same_as(y.grid()));
        Self {
            x,
            y,
            divergence_free: true,
        }
    }

    pub fn zeros(grid: &TorusGrid<T>) -> Self {
        Self::assume_solenoidal(SpectralField::zeros(grid), SpectralField::zeros(grid))
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        self.x.grid()
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    /// `max_k |k·coeff(k)| / max_k |coeff(k)|` using derivative wavenumbers.
    pub fn divergence_defect(&self) -> T {
        let mut worst = T::zero();
        let mut scale = T::zero();
        let (cx, cy) = (self.x.coeffs(), self.y.coeffs());
        for (i, kx, ky) in self.grid().derivative_modes() {
            let dot = cx[i] * T::from_i64_lossy(kx) + cy[i] * T::from_i64_lossy(ky);
            worst = worst.max(dot.norm());
            scale = scale.max(cx[i].norm().max(cy[i].norm()));
        }
        if scale == T::zero() {
            T::zero()
        } else {
            worst / scale
        }
    }

    pub fn check_divergence_free(&self) -> Result<()> {
        let d = self.divergence_defect();
        if d <= T::c(DIVERGENCE_TOLERANCE) {
            Ok(())
        } else {
            Err(Error::NotDivergenceFree { defect: d.to_f64_lossy() })
        }
    }

    pub fn mean(&self) -> (T, T) {
        (self.x.mean(), self.y.mean())
    }

    pub fn remove_mean(&mut self) {
        self.x.remove_mean();
        self.y.remove_mean();
    }

    pub fn divergence(&self) -> SpectralField<T> {
        &self.x.dx() + &self.y.dy()
    }

    /// Scalar curl `∂x v_y - ∂y v_x`.
    pub fn curl(&self) -> SpectralField<T> {
        &self.y.dx() - &self.x.dy()
    }

    /// Mode-wise `(I - k kᵀ/|k|²)`; the mean is left alone.
    pub fn leray_project(&self) -> Self {
        let mut x = self.x.clone();
        let mut y = self.y.clone();
        {
            let (cx, cy) = (x.coeffs_mut(), y.coeffs_mut());
            for (i, kx, ky) in self.grid().derivative_modes() {
                let k2 = kx * kx + ky * ky;
                if k2 == 0 {
                    continue;
                }
                let (fx, fy) = (T::from_i64_lossy(kx), T::from_i64_lossy(ky));
                let inv = T::one() / T::from_i64_lossy(k2);
                let dot = (cx[i] * fx + cy[i] * fy) * inv;
                cx[i] = cx[i] - dot * fx;
                cy[i] = cy[i] - dot * fy;
            }
        }
        Self::assume_solenoidal(x, y)
    }

    pub fn inner(&self, other: &Self) -> T {
        self.x.inner(&other.x) + self.y.inner(&other.y)
    }

    pub fn l2_norm(&self) -> T {
        self.inner(self).sqrt()
    }

    pub fn sobolev_norm(&self, s: SobolevIndex) -> T {
        (self.x.sobolev_norm_sq(s) + self.y.sobolev_norm_sq(s)).sqrt()
    }

    pub fn gradient_norm_sq(&self) -> T {
        self.x.gradient_norm_sq() + self.y.gradient_norm_sq()
    }

    /// Componentwise Laplacian.
    pub fn laplacian(&self) -> Self {
        Self {
            x: self.x.laplacian(),
            y: self.y.laplacian(),
            divergence_free: self.divergence_free,
        }
    }

    pub fn heat_flow(&self, rate_times_t: T) -> Self {
        Self {
            x: self.x.heat_flow(rate_times_t),
            y: self.y.heat_flow(rate_times_t),
            divergence_free: self.divergence_free,
        }
    }

    /// Pointwise magnitude `|v|` on the native samples.
    pub fn magnitude_samples(&self) -> Vec<T> {
        let (sx, sy) = (self.x.to_physical(), self.y.to_physical());
        sx.iter().zip(&sy).map(|(a, b)| (*a * *a + *b * *b).sqrt()).collect()
    }

    /// `max |v|` over native samples.
    pub fn max_magnitude(&self) -> T {
        self.magnitude_samples().into_iter().fold(T::zero(), T::max)
    }

    /// `(∫|v|⁴)^{1/4}`, exact for trigonometric polynomials.
    pub fn l4_norm_exact(&self) -> T {
        let (sx, sy) = (self.x.to_physical_doubled(), self.y.to_physical_doubled());
        let m = T::from_usize_lossy(sx.len());
        let sum = sx.iter().zip(&sy).fold(T::zero(), |acc, (a, b)| {
            let r2 = *a * *a + *b * *b;
            acc + r2 * r2
        });
        (sum / m).sqrt().sqrt()
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            x: self.x.scaled(a),
            y: self.y.scaled(a),
            divergence_free: self.divergence_free,
        }
    }

    /// `self += a * other`; the solenoidal flag survives only if both have it.
    pub fn axpy(&mut self, a: T, other: &Self) {
        self.x.axpy(a, &other.x);
        self.y.axpy(a, &other.y);
        self.divergence_free &= other.divergence_free;
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn max_coeff_abs(&self) -> T {
        self.x.max_coeff_abs().max(self.y.max_coeff_abs())
    }

    pub fn resampled(&self, target: &TorusGrid<T>) -> Self {
        Self {
            x: self.x.resampled(target),
            y: self.y.resampled(target),
            divergence_free: self.divergence_free,
        }
    }
}

/// `∇f`.
pub fn gradient<T: Real>(f: &SpectralField<T>) -> VectorField<T> {
    VectorField {
        x: f.dx(),
        y: f.dy(),
        divergence_free: false,
    }
}

/// `∇⊥f = (-∂y f, ∂x f)`; divergence-free by construction.
pub fn perp_gradient<T: Real>(f: &SpectralField<T>) -> VectorField<T> {
    VectorField::assume_solenoidal(-&f.dy(), f.dx())
}

pub fn divergence<T: Real>(v: &VectorField<T>) -> SpectralField<T> {
    v.divergence()
}

pub fn laplacian<T: Real>(f: &SpectralField<T>) -> SpectralField<T> {
    f.laplacian()
}

pub fn leray_project<T: Real>(v: &VectorField<T>) -> VectorField<T> {
    v.leray_project()
}

/// `(a·∇)b` or `∇·(a⊗b)`, all products dealiased.
///
/// The divergence form requires a solenoidal `a` (checked numerically).
pub fn advective_term<T: Real>(a: &VectorField<T>, b: &VectorField<T>, form: AdvectionForm) -> Result<VectorField<T>> {
    a.grid().ensure_same(b.grid())?;
    let grid = a.grid();
    match form {
        AdvectionForm::Advective => {
            let (ax, ay) = (Padded::of(&a.x), Padded::of(&a.y));
            let mut out_x = Padded::product(&ax, &Padded::of(&b.x.dx()));
            out_x.add_product(&ay, &Padded::of(&b.x.dy()));
            let mut out_y = Padded::product(&ax, &Padded::of(&b.y.dx()));
            out_y.add_product(&ay, &Padded::of(&b.y.dy()));
            VectorField::new(out_x.into_field(grid), out_y.into_field(grid))
        }
        AdvectionForm::Divergence => {
            a.check_divergence_free()?;
            let t = tensor_product(a, b);
            let x = &t.xx.dx() + &t.yx.dy();
            let y = &t.xy.dx() + &t.yy.dy();
            VectorField::new(x, y)
        }
    }
}

/// Dealiased outer product `a⊗b`; entry `ij` is `a_i b_j`.
#[derive(Clone, Debug)]
pub struct Tensor<T: Real> {
    pub xx: SpectralField<T>,
    pub xy: SpectralField<T>,
    pub yx: SpectralField<T>,
    pub yy: SpectralField<T>,
}

pub fn tensor_product<T: Real>(a: &VectorField<T>, b: &VectorField<T>) -> Tensor<T> {
    let grid = a.grid();
    let (ax, ay) = (Padded::of(&a.x), Padded::of(&a.y));
    let (bx, by) = (Padded::of(&b.x), Padded::of(&b.y));
    Tensor {
        xx: Padded::product(&ax, &bx).into_field(grid),
        xy: Padded::product(&ax, &by).into_field(grid),
        yx: Padded::product(&ay, &bx).into_field(grid),
        yy: Padded::product(&ay, &by).into_field(grid),
    }
}

impl<T: Real> Tensor<T> {
    /// Row divergence `(∇·M)_j = Σ_i ∂_i M_ij`.
    pub fn divergence(&self) -> Result<VectorField<T>> {
        VectorField::new(&self.xx.dx() + &self.yx.dy(), &self.xy.dx() + &self.yy.dy())
    }
}

impl<T: Real> Add for &VectorField<T> {
    type Output = VectorField<T>;
    fn add(self, rhs: Self) -> VectorField<T> {
        let mut out = self.clone();
        out.axpy(T::one(), rhs);
        out
    }
}

impl<T: Real> Sub for &VectorField<T> {
    type Output = VectorField<T>;
    fn sub(self, rhs: Self) -> VectorField<T> {
        let mut out = self.clone();
        out.axpy(-T::one(), rhs);
        out
    }
}

impl<T: Real> Mul<T> for &VectorField<T> {
    type Output = VectorField<T>;
    fn mul(self, rhs: T) -> VectorField<T> {
        self.scaled(rhs)
    }
}
