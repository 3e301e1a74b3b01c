use crate::error::{Error, Result};
use crate::fields::SpectralField;
use crate::scalar::Real;

/// Dyadic BMO seminorm: the largest mean oscillation
/// `|Q|⁻¹ ∫_Q |f - f_Q|` over origin-anchored dyadic squares, from the
/// whole torus down to `2 × 2` cells.
pub fn bmo_seminorm<T: Real>(f: &SpectralField<T>) -> Result<T> {
    let n = f.grid().n();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(dyadic_bmo(&f.to_physical(), n))
}

pub(crate) fn dyadic_bmo<T: Real>(samples: &[T], n: usize) -> T {
    let mut worst = T::zero();
    let mut side = n;
    while side >= 2 {
        let per_row = n / side;
        let count = per_row * per_row;
        let mut sums = vec![T::zero(); count];
        for iy in 0..n {
            let row = (iy / side) * per_row;
            for ix in 0..n {
                let q = row + ix / side;
                sums[q] = sums[q] + samples[iy * n + ix];
            }
        }
        let area = T::from_usize_lossy(side * side);
        let means: Vec<T> = sums.iter().map(|&s| s / area).collect();
        let mut osc = vec![T::zero(); count];
        for iy in 0..n {
            let row = (iy / side) * per_row;
            for ix in 0..n {
                let q = row + ix / side;
                osc[q] = osc[q] + (samples[iy * n + ix] - means[q]).abs();
            }
        }
        for o in osc {
            worst = worst.max(o / area);
        }
        side /= 2;
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::random_sobolev;
    use crate::TorusGrid;
    use std::f64::consts::TAU;

    /// Visits each dyadic square separately.
    fn enumerate_squares(samples: &[f64], n: usize) -> f64 {
        let mut worst = 0.0f64;
        let mut side = n;
        while side >= 2 {
            for qy in (0..n).step_by(side) {
                for qx in (0..n).step_by(side) {
                    let cells: Vec<f64> = (qy..qy + side)
                        .flat_map(|y| (qx..qx + side).map(move |x| samples[y * n + x]))
                        .collect();
                    let mean = cells.iter().sum::<f64>() / cells.len() as f64;
                    let osc = cells.iter().map(|v| (v - mean).abs()).sum::<f64>() / cells.len() as f64;
                    worst = worst.max(osc);
                }
            }
            side /= 2;
        }
        worst
    }

    #[test]
    fn constant_has_zero_oscillation() {
        let g = TorusGrid::<f64>::new(16).unwrap();
        assert!(bmo_seminorm(&SpectralField::constant(&g, 4.0)).unwrap() < 1e-14);
    }

    #[test]
    fn cosine_matches_enumeration() {
        let g = TorusGrid::<f64>::new(64).unwrap();
        let f = SpectralField::from_fn(&g, |x, _| (TAU * x).cos());
        let fast = bmo_seminorm(&f).unwrap();
        let slow = enumerate_squares(&f.to_physical(), 64);
        assert!((fast - slow).abs() < 1e-13);
        // the whole torus: mean |cos| = 2/π
        assert!(fast >= 2.0 / std::f64::consts::PI - 1e-3);
    }

    #[test]
    fn shift_invariant_exactly() {
        let g = TorusGrid::<f64>::new(32).unwrap();
        let f = random_sobolev(&g, 8, 1.5, 1.0).x;
        let shifted = &f + &SpectralField::constant(&g, 3.0);
        let a = dyadic_bmo(&f.to_physical(), 32);
        let slow = enumerate_squares(&f.to_physical(), 32);
        assert!((a - slow).abs() < 1e-13);
        let b = bmo_seminorm(&shifted).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn non_power_of_two_is_rejected() {
        let g = TorusGrid::<f64>::new(12).unwrap();
        assert!(matches!(bmo_seminorm(&SpectralField::zeros(&g)), Err(Error::NotPowerOfTwo(12))));
    }
}
