//! Quadratic products with 3/2-rule zero padding.
//!
//! Inputs are embedded in a `3n/2` grid, multiplied pointwise and truncated
//! back. With the Nyquist row and column dropped on output, every retained
//! coefficient of the product is exact.

use num_complex::Complex;

use super::spectral::{embed, truncate, SpectralField};
use crate::error::Result;
use crate::grid::TorusGrid;
use crate::scalar::Real;

/// A field sampled on the padded `3n/2` grid.
#[derive(Clone)]
pub(crate) struct Padded<T: Real> {
    pub(crate) data: Vec<Complex<T>>,
}

impl<T: Real> Padded<T> {
    pub(crate) fn of(f: &SpectralField<T>) -> Self {
        let plan = f.grid().padded_plan();
        let mut data = embed(f.grid(), f.coeffs(), plan.size());
        plan.inverse(&mut data);
        Self { data }
    }

    pub(crate) fn zeros_like(&self) -> Self {
        Self {
            data: vec![Complex::new(T::zero(), T::zero()); self.data.len()],
        }
    }

    /// `self += a * b` pointwise.
    pub(crate) fn add_product(&mut self, a: &Self, b: &Self) {
        for ((o, x), y) in self.data.iter_mut().zip(&a.data).zip(&b.data) {
            *o = *o + *x * *y;
        }
    }

    /// `self -= a * b` pointwise.
    pub(crate) fn sub_product(&mut self, a: &Self, b: &Self) {
        for ((o, x), y) in self.data.iter_mut().zip(&a.data).zip(&b.data) {
            *o = *o - *x * *y;
        }
    }

    pub(crate) fn product(a: &Self, b: &Self) -> Self {
        let mut out = a.zeros_like();
        out.add_product(a, b);
        out
    }

    pub(crate) fn into_field(mut self, grid: &TorusGrid<T>) -> SpectralField<T> {
        let plan = grid.padded_plan();
        plan.forward(&mut self.data);
        let coeff = truncate(grid, &self.data, plan.size());
        SpectralField::from_coeffs(grid, coeff).expect("truncation yields native size")
    }
}

/// Coefficients of `f·g` on the retained (non-Nyquist) wavenumbers.
pub fn dealiased_product<T: Real>(f: &SpectralField<T>, g: &SpectralField<T>) -> Result<SpectralField<T>> {
    f.grid().ensure_same(g.grid())?;
    let pf = Padded::of(f);
    let pg = Padded::of(g);
    Ok(Padded::product(&pf, &pg).into_field(f.grid()))
}
