//! Empirical ratios `lhs / rhs` for the interpolation inequalities.
//!
//! None of these inequalities comes with a known best constant; the checks
//! only report the ratio so that corpus sweeps can estimate one.

use super::bmo::dyadic_bmo;
use super::rearrangement::Rearrangement;
use crate::error::{Error, Result};
use crate::fields::{lp_norm_of_samples, SobolevIndex, SpectralField};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityRatioReport<T: Real> {
    pub lhs: T,
    pub rhs: T,
    pub ratio: T,
    /// Describes the field the ratio was measured on.
    pub corpus_id: String,
}

impl<T: Real> InequalityRatioReport<T> {
    pub fn new(lhs: T, rhs: T, corpus_id: impl Into<String>) -> Result<Self> {
        if !(rhs > T::zero()) {
            return Err(Error::Degenerate(format!("right-hand side is {rhs}")));
        }
        Ok(Self {
            lhs,
            rhs,
            ratio: lhs / rhs,
            corpus_id: corpus_id.into(),
        })
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.corpus_id = id.into();
        self
    }
}

fn has_oscillation<T: Real>(f: &SpectralField<T>) -> bool {
    f.coeffs().iter().skip(1).any(|c| c.re != T::zero() || c.im != T::zero())
}

fn require_nonconstant<T: Real>(f: &SpectralField<T>) -> Result<()> {
    if has_oscillation(f) {
        Ok(())
    } else {
        Err(Error::Degenerate("constant field".into()))
    }
}

/// `‖f‖_{L⁴} ≤ c ‖f‖_{L²}^{1/2} ‖f‖_{H¹}^{1/2}`.
pub fn check_ladyzhenskaya<T: Real>(f: &SpectralField<T>) -> Result<InequalityRatioReport<T>> {
    require_nonconstant(f)?;
    let lhs = f.l4_norm_exact();
    let rhs = (f.l2_norm() * f.sobolev_norm(SobolevIndex::H1)).sqrt();
    InequalityRatioReport::new(lhs, rhs, "ladyzhenskaya")
}

/// `‖f‖_{L⁴} ≤ c ‖f‖_{L^{2,∞}}^{1/2} ‖∇f‖_{L²}^{1/2}`.
pub fn check_weak_ladyzhenskaya<T: Real>(f: &SpectralField<T>) -> Result<InequalityRatioReport<T>> {
    require_nonconstant(f)?;
    let lhs = f.l4_norm_exact();
    let weak = Rearrangement::of(f).weak_lp(T::c(2.0)).value;
    let rhs = (weak * f.gradient_norm_sq().sqrt()).sqrt();
    InequalityRatioReport::new(lhs, rhs, "weak_ladyzhenskaya")
}

/// `‖f‖_{L⁴} ≤ c κ^{1/2} ‖f‖_{L^{2,∞}}` for `f` supported on `|k| ≤ κ`.
pub fn check_bernstein<T: Real>(f: &SpectralField<T>, kappa: T) -> Result<InequalityRatioReport<T>> {
    let tol = T::c(1e-12) * f.max_coeff_abs();
    let kmax = f.max_active_wavenumber(tol);
    if kmax > kappa {
        return Err(Error::NotBandLimited {
            kappa: kappa.to_f64_lossy(),
            found: kmax.to_f64_lossy(),
        });
    }
    let lhs = f.l4_norm_exact();
    let weak = Rearrangement::of(f).weak_lp(T::c(2.0)).value;
    InequalityRatioReport::new(lhs, kappa.sqrt() * weak, format!("bernstein_kappa_{kappa}"))
}

/// Strong and weak forms of the BMO interpolation bound
/// `‖f‖_X ≤ c ‖f‖_{L^{q,∞}}^{q/p} ‖f‖_{BMO}^{1-q/p}` with `X = L^p` and
/// `X = L^{p,∞}` respectively.
#[derive(Debug, Clone, PartialEq)]
pub struct BmoInterpolationReport<T: Real> {
    pub strong: InequalityRatioReport<T>,
    pub weak: InequalityRatioReport<T>,
}

pub fn check_bmo_interpolation<T: Real>(f: &SpectralField<T>, q: T, p: T) -> Result<BmoInterpolationReport<T>> {
    if !(T::one() < q && q < p) {
        return Err(Error::param("q, p", "need 1 < q < p"));
    }
    let n = f.grid().n();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let samples = f.to_physical();
    let bmo = dyadic_bmo(&samples, n);
    if !(bmo > T::zero()) {
        return Err(Error::Degenerate("BMO seminorm vanishes".into()));
    }
    let r = Rearrangement::from_samples(&samples, f.grid().cell_measure());
    let a = q / p;
    let rhs = r.weak_lp(q).value.powf(a) * bmo.powf(T::one() - a);
    let strong = InequalityRatioReport::new(lp_norm_of_samples(&samples, p), rhs, "bmo_strong")?;
    let weak = InequalityRatioReport::new(r.weak_lp(p).value, rhs, "bmo_weak")?;
    Ok(BmoInterpolationReport { strong, weak })
}

/// Exponent `α` with `(1-α)/q + α/r = 1/p`.
pub fn weak_strong_exponent<T: Real>(q: T, p: T, r: T) -> T {
    (T::one() / q - T::one() / p) / (T::one() / q - T::one() / r)
}

/// `‖f‖_{L^p} ≤ c ‖f‖_{L^{q,∞}}^{1-α} ‖f‖_{L^{r,∞}}^{α}`.
///
/// The zero field returns the ratio `0` with both sides zero.
pub fn check_weak_strong_interpolation<T: Real>(f: &SpectralField<T>, q: T, p: T, r: T) -> Result<InequalityRatioReport<T>> {
    if !(T::one() < q && q < p && p < r) {
        return Err(Error::param("q, p, r", "need 1 < q < p < r"));
    }
    let samples = f.to_physical();
    let lhs = lp_norm_of_samples(&samples, p);
    let re = Rearrangement::from_samples(&samples, f.grid().cell_measure());
    let alpha = weak_strong_exponent(q, p, r);
    let rhs = re.weak_lp(q).value.powf(T::one() - alpha) * re.weak_lp(r).value.powf(alpha);
    if rhs == T::zero() && lhs == T::zero() {
        return Ok(InequalityRatioReport {
            lhs,
            rhs,
            ratio: T::zero(),
            corpus_id: "weak_strong".into(),
        });
    }
    InequalityRatioReport::new(lhs, rhs, "weak_strong")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::random_sobolev;
    use crate::TorusGrid;
    use std::f64::consts::{PI, TAU};

    fn grid(n: usize) -> TorusGrid<f64> {
        TorusGrid::new(n).unwrap()
    }

    #[test]
    fn ladyzhenskaya_on_product_of_sines() {
        let g = grid(32);
        let f = SpectralField::from_fn(&g, |x, y| (TAU * x).sin() * (TAU * y).sin());
        let r = check_ladyzhenskaya(&f).unwrap();
        // ∫ sin⁴ sin⁴ = 9/64, ∫ sin² sin² = 1/4, ∫|∇f|² = 2π²
        let l4 = (9.0f64 / 64.0).powf(0.25);
        let l2 = 0.5;
        let h1 = (0.25 + 2.0 * PI * PI).sqrt();
        assert!((r.lhs - l4).abs() < 1e-14);
        assert!((r.rhs - (l2 * h1).sqrt()).abs() < 1e-13);
        assert!((r.ratio - 0.41).abs() < 5e-3, "ratio {}", r.ratio);
    }

    #[test]
    fn degenerate_inputs() {
        let g = grid(16);
        let z = SpectralField::zeros(&g);
        assert!(matches!(check_ladyzhenskaya(&z), Err(Error::Degenerate(_))));
        assert!(matches!(check_weak_ladyzhenskaya(&z), Err(Error::Degenerate(_))));
        let c = SpectralField::constant(&g, 2.0);
        assert!(matches!(check_bmo_interpolation(&c, 2.0, 4.0), Err(Error::Degenerate(_))));
        let w = check_weak_strong_interpolation(&z, 2.0, 3.0, 4.0).unwrap();
        assert_eq!((w.lhs, w.rhs, w.ratio), (0.0, 0.0, 0.0));
        assert!(check_weak_strong_interpolation(&c, 3.0, 2.0, 4.0).is_err());
    }

    #[test]
    fn bernstein_requires_band_limit() {
        let g = grid(16);
        let f = SpectralField::from_fn(&g, |x, _| (TAU * x).cos());
        let r = check_bernstein(&f, 1.0).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        let h = SpectralField::from_fn(&g, |x, y| (TAU * 3.0 * x).cos() * (TAU * y).sin());
        assert!(matches!(check_bernstein(&h, 2.0), Err(Error::NotBandLimited { .. })));
    }

    #[test]
    fn weak_strong_exponent_solves_linear_relation() {
        assert!((weak_strong_exponent(2.0, 3.0, 4.0) - 2.0 / 3.0f64).abs() < 1e-15);
    }

    #[test]
    fn weak_form_strengthens_classical() {
        for seed in 0..20 {
            let f = random_sobolev(&grid(32), seed, 2.0, 1.0).x;
            let classical = check_ladyzhenskaya(&f).unwrap();
            let weak = check_weak_ladyzhenskaya(&f).unwrap();
            let weak_l2 = Rearrangement::of(&f).weak_lp(2.0).value;
            assert!(weak_l2 <= f.l2_norm() * (1.0 + 1e-12));
            // ‖∇f‖ ≤ ‖f‖_{H¹} and ‖f‖_{L^{2,∞}} ≤ ‖f‖_{L²}
            assert!(weak.ratio >= classical.ratio * (1.0 - 1e-12));
            let bmo = check_bmo_interpolation(&f, 2.0, 4.0).unwrap();
            assert!(bmo.weak.ratio <= bmo.strong.ratio * (1.0 + 1e-12));
            assert!(check_weak_strong_interpolation(&f, 2.0, 3.0, 4.0).unwrap().ratio.is_finite());
        }
    }
}
