//! Periodic grid on the unit torus and the 2D FFT plans attached to it.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Forward/inverse plans for an `m × m` transform.
pub(crate) struct Plan2<T: Real> {
    m: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Plan2<T> {
    fn new(planner: &mut FftPlanner<T>, m: usize) -> Self {
        Self {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub(crate) fn size(&self) -> usize {
        self.m
    }

    /// Physical samples -> Fourier-series coefficients (divides by `m²`).
    pub(crate) fn forward(&self, data: &mut [Complex<T>]) {
        self.run(&*self.forward, data);
        let scale = T::one() / T::from_usize_lossy(self.m * self.m);
        for c in data.iter_mut() {
            *c = *c * scale;
        }
    }

    /// Fourier-series coefficients -> physical samples (no scaling).
    pub(crate) fn inverse(&self, data: &mut [Complex<T>]) {
        self.run(&*self.inverse, data);
    }

    fn run(&self, fft: &dyn Fft<T>, data: &mut [Complex<T>]) {
        let m = self.m;
        debug_assert_eq!(data.len(), m * m);
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
        // rows are contiguous; transpose to reach the columns
        fft.process_with_scratch(data, &mut scratch);
        transpose_square(data, m);
        fft.process_with_scratch(data, &mut scratch);
        transpose_square(data, m);
    }
}

fn transpose_square<C: Copy>(data: &mut [C], m: usize) {
    for r in 0..m {
        for c in (r + 1)..m {
            data.swap(r * m + c, c * m + r);
        }
    }
}

struct GridInner<T: Real> {
    n: usize,
    native: Plan2<T>,
    padded: Plan2<T>,
    doubled: Plan2<T>,
}

/// Uniform `n × n` sampling of the unit torus `[0,1)²`.
///
/// Cloning is cheap; the FFT plans are shared. Sample `(ix, iy)` sits at
/// `(ix/n, iy/n)` and is stored row-major at `iy * n + ix`. Coefficient
/// storage uses the same layout, index `i` holding wavenumber `i` for
/// `i < n/2` and `i - n` otherwise, so the wavenumber set per axis is
/// `{-n/2, ..., n/2 - 1}`.
#[derive(Clone)]
pub struct TorusGrid<T: Real> {
    inner: Arc<GridInner<T>>,
}

impl<T: Real> TorusGrid<T> {
    /// Grid with `n` samples per side; `n` must be even and at least 4.
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(n));
        }
        let mut planner = FftPlanner::new();
        let native = Plan2::new(&mut planner, n);
        let padded = Plan2::new(&mut planner, 3 * n / 2);
        let doubled = Plan2::new(&mut planner, 2 * n);
        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                native,
                padded,
                doubled,
            }),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inner.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.inner.n * self.inner.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Domain period; always one.
    #[inline]
    pub fn period(&self) -> T {
        T::one()
    }

    /// Area of one sample cell, `1/n²`.
    #[inline]
    pub fn cell_measure(&self) -> T {
        T::one() / T::from_usize_lossy(self.len())
    }

    /// Signed wavenumber for storage index `i` along one axis.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        signed_wavenumber(i, self.inner.n)
    }

    /// Wavenumber used by first-derivative operators: the Nyquist index
    /// `-n/2` maps to zero so that differentiated real fields stay real.
    #[inline]
    pub fn derivative_wavenumber(&self, i: usize) -> i64 {
        if i == self.inner.n / 2 {
            0
        } else {
            signed_wavenumber(i, self.inner.n)
        }
    }

    #[inline]
    pub fn is_nyquist(&self, ix: usize, iy: usize) -> bool {
        let h = self.inner.n / 2;
        ix == h || iy == h
    }

    /// Storage index of wavenumber `k`, wrapping modulo `n`.
    #[inline]
    pub fn index_of(&self, kx: i64, ky: i64) -> usize {
        let n = self.inner.n as i64;
        let ix = kx.rem_euclid(n) as usize;
        let iy = ky.rem_euclid(n) as usize;
        iy * self.inner.n + ix
    }

    /// Storage index of `-k` for the mode stored at `(ix, iy)`.
    #[inline]
    pub fn conjugate_index(&self, ix: usize, iy: usize) -> usize {
        let n = self.inner.n;
        ((n - iy) % n) * n + (n - ix) % n
    }

    /// Physical coordinates of sample `(ix, iy)`.
    #[inline]
    pub fn point(&self, ix: usize, iy: usize) -> (T, T) {
        let n = T::from_usize_lossy(self.inner.n);
        (T::from_usize_lossy(ix) / n, T::from_usize_lossy(iy) / n)
    }

    /// Iterator over `(storage index, kx, ky)` for every mode.
    pub fn modes(&self) -> impl Iterator<Item = (usize, i64, i64)> + '_ {
        let n = self.inner.n;
        (0..n).flat_map(move |iy| {
            (0..n).map(move |ix| (iy * n + ix, signed_wavenumber(ix, n), signed_wavenumber(iy, n)))
        })
    }

    /// Iterator over `(storage index, kx, ky)` using derivative wavenumbers.
    pub fn derivative_modes(&self) -> impl Iterator<Item = (usize, i64, i64)> + '_ {
        let n = self.inner.n;
        (0..n).flat_map(move |iy| {
            (0..n).map(move |ix| (iy * n + ix, self.derivative_wavenumber(ix), self.derivative_wavenumber(iy)))
        })
    }

    pub(crate) fn native_plan(&self) -> &Plan2<T> {
        &self.inner.native
    }

    /// Plan for the `3n/2` grid used by dealiased quadratic products.
    pub(crate) fn padded_plan(&self) -> &Plan2<T> {
        &self.inner.padded
    }

    /// Plan for the `2n` grid; exact quadrature for quartic integrands.
    pub(crate) fn doubled_plan(&self) -> &Plan2<T> {
        &self.inner.doubled
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                expected: self.n(),
                found: other.n(),
            })
        }
    }
}

impl<T: Real> PartialEq for TorusGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl<T: Real> fmt::Debug for TorusGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid").field("n", &self.inner.n).finish()
    }
}

#[inline]
pub(crate) fn signed_wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_tiny_grids() {
        assert!(TorusGrid::<f64>::new(5).is_err());
        assert!(TorusGrid::<f64>::new(2).is_err());
        assert!(TorusGrid::<f64>::new(0).is_err());
        assert!(TorusGrid::<f64>::new(4).is_ok());
    }

    #[test]
    fn wavenumber_set_is_half_open() {
        let g = TorusGrid::<f64>::new(8).unwrap();
        let ks: Vec<i64> = (0..8).map(|i| g.wavenumber(i)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.derivative_wavenumber(4), 0);
        assert_eq!(g.index_of(-1, 2), 2 * 8 + 7);
        assert_eq!(g.conjugate_index(1, 0), 7);
        assert_eq!(g.conjugate_index(4, 4), 4 * 8 + 4);
    }

    #[test]
    fn cell_measure_is_inverse_square() {
        let g = TorusGrid::<f64>::new(16).unwrap();
        assert_eq!(g.cell_measure(), 1.0 / 256.0);
    }
}
