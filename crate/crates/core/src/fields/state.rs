use super::vector::VectorField;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Time-stamped magnetic field with the physical parameters.
#[derive(Clone, Debug)]
pub struct FlowState<T: Real> {
    pub t: T,
    pub b: VectorField<T>,
    pub nu: T,
    /// Zero selects the non-resistive exploratory mode.
    pub eta: T,
}

impl<T: Real> FlowState<T> {
    pub fn new(t: T, b: VectorField<T>, nu: T, eta: T) -> Result<Self> {
        if !(nu > T::zero()) {
            return Err(Error::param("nu", format!("must be > 0, got {nu}")));
        }
        if !(eta >= T::zero()) {
            return Err(Error::param("eta", format!("must be >= 0, got {eta}")));
        }
        b.check_divergence_free()?;
        let (mx, my) = b.mean();
        let scale = b.max_coeff_abs().max(T::one());
        if mx.abs() > T::c(1e-12) * scale || my.abs() > T::c(1e-12) * scale {
            return Err(Error::param("B", "magnetic field must have zero mean"));
        }
        let b = VectorField::assume_solenoidal(b.x, b.y);
        Ok(Self { t, b, nu, eta })
    }

    /// `½‖B‖²_{L²}`.
    pub fn energy(&self) -> T {
        T::c(0.5) * self.b.inner(&self.b)
    }
}
