use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fields::{advective_term, AdvectionForm, SobolevIndex, SpectralField, VectorField};
use crate::scalar::Real;

/// Velocity and total pressure solving `-νΔu + ∇p* = g`, `∇·u = 0` on the
/// unit torus.
#[derive(Clone, Debug)]
pub struct StokesSolution<T: Real> {
    pub u: VectorField<T>,
    /// Zero-mean total pressure.
    pub p_star: SpectralField<T>,
}

impl<T: Real> StokesSolution<T> {
    /// `‖-νΔu + ∇p* - g‖_{H⁻¹} / ‖g‖_{H⁻¹}`; zero for zero forcing.
    ///
    /// Modes whose derivative wavenumber vanishes (the mean and the pure
    /// Nyquist modes) carry no derivative and are left out of both norms.
    pub fn relative_residual(&self, forcing: &VectorField<T>, nu: T) -> T {
        let lap = self.u.laplacian();
        let rx = &(&lap.x.scaled(-nu) + &self.p_star.dx()) - &forcing.x;
        let ry = &(&lap.y.scaled(-nu) + &self.p_star.dy()) - &forcing.y;
        let num = (solvable_part(&rx).sobolev_norm_sq(SobolevIndex::H_MINUS_1)
            + solvable_part(&ry).sobolev_norm_sq(SobolevIndex::H_MINUS_1))
        .sqrt();
        let den = (solvable_part(&forcing.x).sobolev_norm_sq(SobolevIndex::H_MINUS_1)
            + solvable_part(&forcing.y).sobolev_norm_sq(SobolevIndex::H_MINUS_1))
        .sqrt();
        if den == T::zero() {
            num
        } else {
            num / den
        }
    }
}

fn solvable_part<T: Real>(f: &SpectralField<T>) -> SpectralField<T> {
    let mut out = f.clone();
    let grid = f.grid().clone();
    let c = out.coeffs_mut();
    for (i, kx, ky) in grid.derivative_modes() {
        if kx == 0 && ky == 0 {
            c[i] = Complex::new(T::zero(), T::zero());
        }
    }
    out
}

/// Fourier-multiplier Stokes solve.
///
/// Mode by mode `û = (I - kkᵀ/|k|²) ĝ / (4π²ν|k|²)` and
/// `p̂* = -i (k·ĝ) / (2π|k|²)`; the mean of both is zero. Fails when the
/// mean of `g` is not zero.
pub fn solve_stokes<T: Real>(forcing: &VectorField<T>, nu: T) -> Result<StokesSolution<T>> {
    if !(nu > T::zero()) {
        return Err(Error::param("nu", format!("must be > 0, got {nu}")));
    }
    let (mx, my) = forcing.mean();
    let scale = forcing.max_coeff_abs();
    let magnitude = mx.abs().max(my.abs());
    if magnitude > T::c(1e-12) * scale.max(T::min_positive_value()) {
        return Err(Error::NonzeroMeanForcing {
            magnitude: magnitude.to_f64_lossy(),
        });
    }
    let grid = forcing.grid();
    let tp = T::two_pi();
    let mut ux = SpectralField::zeros(grid);
    let mut uy = SpectralField::zeros(grid);
    let mut p = SpectralField::zeros(grid);
    let (gx, gy) = (forcing.x.coeffs(), forcing.y.coeffs());
    {
        let (cx, cy, cp) = (ux.coeffs_mut(), uy.coeffs_mut(), p.coeffs_mut());
        for (i, kx, ky) in grid.derivative_modes() {
            let k2 = kx * kx + ky * ky;
            if k2 == 0 {
                continue;
            }
            let (fx, fy, k2) = (T::from_i64_lossy(kx), T::from_i64_lossy(ky), T::from_i64_lossy(k2));
            let dot = (gx[i] * fx + gy[i] * fy) / k2;
            let visc = T::one() / (tp * tp * nu * k2);
            cx[i] = (gx[i] - dot * fx) * visc;
            cy[i] = (gy[i] - dot * fy) * visc;
            cp[i] = Complex::new(dot.im, -dot.re) / tp;
        }
    }
    Ok(StokesSolution {
        u: VectorField::assume_solenoidal(ux, uy),
        p_star: p,
    })
}

/// Velocity slaved to `B`: the Stokes solve forced by `∇·(B⊗B) = (B·∇)B`.
pub fn velocity_from_b<T: Real>(b: &VectorField<T>, nu: T) -> Result<StokesSolution<T>> {
    Ok(velocity_and_forcing(b, nu)?.0)
}

pub(crate) fn velocity_and_forcing<T: Real>(b: &VectorField<T>, nu: T) -> Result<(StokesSolution<T>, VectorField<T>)> {
    let forcing = advective_term(b, b, AdvectionForm::Divergence)?;
    Ok((solve_stokes(&forcing, nu)?, forcing))
}
