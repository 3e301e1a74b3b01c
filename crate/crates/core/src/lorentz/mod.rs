//! Lorentz-space quantities on the torus: distribution functions, weak-`L^p`
//! quasinorms, dyadic BMO, the `(L¹, L∞)` K-functional and the inequality
//! checks built from them.
//!
//! The measure is counting measure on the physical samples times the cell
//! area, so every quantity converges to its Lebesgue counterpart as `n`
//! grows.

mod bmo;
mod corpus;
mod inequalities;
mod rearrangement;

pub use bmo::bmo_seminorm;
pub use corpus::{corpus_field, lorentz_corpus, CORPUS_EXPONENT_RANGE, STANDARD_CORPUS_SIZE};
pub use inequalities::{
    check_bernstein, check_bmo_interpolation, check_ladyzhenskaya, check_weak_ladyzhenskaya,
    check_weak_strong_interpolation, weak_strong_exponent, BmoInterpolationReport, InequalityRatioReport,
};
pub use rearrangement::{
    distribution_function, interpolation_quasinorm, k_functional, weak_lp_quasinorm, DistributionFunction,
    QuasiNormReport, Rearrangement,
};

use crate::fields::SpectralField;
use crate::grid::TorusGrid;
use crate::scalar::Real;

/// `|x - (½, ½)|⁻¹` discretised by its infimum over each sample cell, i.e.
/// one over the distance to the farthest corner of the cell.
///
/// The discretisation never exceeds the function, so its weak-`L²`
/// quasinorm increases towards `√π` as the grid is refined.
pub fn centered_inverse_distance<T: Real>(grid: &TorusGrid<T>) -> SpectralField<T> {
    let n = grid.n();
    let h = T::one() / T::from_usize_lossy(n);
    let half = T::c(0.5);
    let mut samples = Vec::with_capacity(grid.len());
    for iy in 0..n {
        for ix in 0..n {
            let (x, y) = grid.point(ix, iy);
            let dx = (x - half).abs() + h * half;
            let dy = (y - half).abs() + h * half;
            samples.push(T::one() / (dx * dx + dy * dy).sqrt());
        }
    }
    SpectralField::from_physical(grid, &samples).expect("sample count matches grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_distance_level_set_area() {
        // analytic: μ{|x|^{-1} > 4} = π/16
        let target = std::f64::consts::PI / 16.0;
        let mut errs = Vec::new();
        for n in [64usize, 128, 256] {
            let g = TorusGrid::<f64>::new(n).unwrap();
            let d = distribution_function(&centered_inverse_distance(&g), &[4.0]).unwrap();
            errs.push((d.measures[0] - target).abs());
        }
        assert!(errs.windows(2).all(|w| w[1] < w[0]));
        assert!(errs[2] < 0.01);
    }

    #[test]
    fn inverse_distance_weak_l2_tends_to_sqrt_pi() {
        let g = TorusGrid::<f64>::new(256).unwrap();
        let q = weak_lp_quasinorm(&centered_inverse_distance(&g), 2.0).unwrap();
        let target = std::f64::consts::PI.sqrt();
        assert!(q.value <= target && q.value > 0.99 * target);
    }
}
