use crate::error::{Error, Result};
use crate::scalar::Real;

/// Free-space Stokes fundamental solution at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct GreensEval<T: Real> {
    pub x: [T; 2],
    /// `U_ij`.
    pub u: [[T; 2]; 2],
    /// `q_j`.
    pub q: [T; 2],
    /// `grad_u[i][j][k] = ∂_k U_ij`.
    pub grad_u: [[[T; 2]; 2]; 2],
}

impl<T: Real> GreensEval<T> {
    /// `max_ijk |∂_k U_ij(x)| · πν|x|`; at most one.
    pub fn gradient_bound_ratio(&self, nu: T) -> T {
        let r = (self.x[0] * self.x[0] + self.x[1] * self.x[1]).sqrt();
        let mut worst = T::zero();
        for row in &self.grad_u {
            for col in row {
                for v in col {
                    worst = worst.max(v.abs());
                }
            }
        }
        worst * T::PI() * nu * r
    }
}

fn delta<T: Real>(a: usize, b: usize) -> T {
    if a == b {
        T::one()
    } else {
        T::zero()
    }
}

/// `U_ij = (x_i x_j/|x|² - δ_ij log|x|) / 4πν`, `q_j = x_j / 2π|x|²` and
/// `∂_k U_ij = ((δ_ik x_j + δ_kj x_i)/|x|² - 2 x_i x_j x_k/|x|⁴ - δ_ij x_k/|x|²) / 4πν`.
pub fn greens_eval<T: Real>(x: [T; 2], nu: T) -> Result<GreensEval<T>> {
    let r2 = x[0] * x[0] + x[1] * x[1];
    if !(r2 > T::zero()) {
        return Err(Error::param("x", "the fundamental solution is singular at the origin"));
    }
    if !(nu > T::zero()) {
        return Err(Error::param("nu", format!("must be > 0, got {nu}")));
    }
    let c = T::one() / (T::c(4.0) * T::PI() * nu);
    let log_r = T::c(0.5) * r2.ln();
    let r4 = r2 * r2;
    let two = T::c(2.0);
    let mut u = [[T::zero(); 2]; 2];
    let mut grad_u = [[[T::zero(); 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            u[i][j] = c * (x[i] * x[j] / r2 - delta::<T>(i, j) * log_r);
            for k in 0..2 {
                grad_u[i][j][k] = c
                    * ((delta::<T>(i, k) * x[j] + delta::<T>(k, j) * x[i]) / r2
                        - two * x[i] * x[j] * x[k] / r4
                        - delta::<T>(i, j) * x[k] / r2);
            }
        }
    }
    let q = [x[0] / (T::two_pi() * r2), x[1] / (T::two_pi() * r2)];
    Ok(GreensEval { x, u, q, grad_u })
}

/// `max_ijk |∂_k U_ij|·πν|x|` over the points; the pointwise bound says
/// this never exceeds one.
pub fn greens_bound_sweep<T: Real>(points: &[[T; 2]], nu: T) -> Result<T> {
    let mut worst = T::zero();
    for &p in points {
        worst = worst.max(greens_eval(p, nu)?.gradient_bound_ratio(nu));
    }
    Ok(worst)
}

/// Deterministic random sample points in `[-scale, scale]²` with log-uniform
/// radius, covering both the near and far field.
pub fn greens_sample_points(count: usize, seed: u64) -> Vec<[f64; 2]> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = 10f64.powf(rng.random_range(-6.0..6.0));
            let th = rng.random_range(0.0..std::f64::consts::TAU);
            [r * th.cos(), r * th.sin()]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_point_closed_form() {
        for nu in [0.1, 1.0, 10.0] {
            let g = greens_eval([1.0, 0.0], nu).unwrap();
            assert!((g.u[0][0] - 1.0 / (4.0 * PI * nu)).abs() < 1e-15);
            assert_eq!(g.u[1][1], 0.0);
            assert_eq!((g.u[0][1], g.u[1][0]), (0.0, 0.0));
            assert!((g.q[0] - 1.0 / (2.0 * PI)).abs() < 1e-15);
            assert_eq!(g.q[1], 0.0);
        }
    }

    #[test]
    fn origin_is_rejected() {
        assert!(greens_eval([0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn even_symmetric_and_bounded() {
        let pts = greens_sample_points(10_000, 3);
        for nu in [0.1, 1.0, 10.0] {
            for &p in &pts {
                let a = greens_eval(p, nu).unwrap();
                let b = greens_eval([-p[0], -p[1]], nu).unwrap();
                assert_eq!(a.u, b.u);
                assert_eq!(a.u[0][1], a.u[1][0]);
                assert!(a.gradient_bound_ratio(nu) <= 1.0);
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let h = 1e-5;
        for p in greens_sample_points(200, 11) {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            if !(0.1..10.0).contains(&r) {
                continue;
            }
            let g = greens_eval(p, 1.0).unwrap();
            for k in 0..2 {
                let mut plus = p;
                let mut minus = p;
                plus[k] += h;
                minus[k] -= h;
                let (up, um) = (greens_eval(plus, 1.0).unwrap().u, greens_eval(minus, 1.0).unwrap().u);
                for i in 0..2 {
                    for j in 0..2 {
                        let fd = (up[i][j] - um[i][j]) / (2.0 * h);
                        // truncation O(h²/r³) plus cancellation O(ε/h)
                        let tol = 1e-9 / (r * r * r) + 1e-10;
                        assert!((fd - g.grad_u[i][j][k]).abs() < tol, "{p:?} {i}{j}{k}: fd {fd} vs {}", g.grad_u[i][j][k]);
                    }
                }
            }
        }
    }

    #[test]
    fn bound_is_attained_up_to_constant() {
        // the largest entry is √2/(4πν|x|), reached at 45°
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let g = greens_eval([s, s], 1.0).unwrap();
        let ratio = g.gradient_bound_ratio(1.0);
        assert!((ratio - std::f64::consts::SQRT_2 / 4.0).abs() < 1e-14, "{ratio}");
    }

    #[test]
    fn velocity_is_divergence_free_and_solves_stokes_away_from_origin() {
        // Σ_i ∂_i U_ij = 0
        for p in greens_sample_points(100, 5) {
            let g = greens_eval(p, 2.0).unwrap();
            for j in 0..2 {
                let div = g.grad_u[0][j][0] + g.grad_u[1][j][1];
                let scale = g.grad_u.iter().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(div.abs() <= 1e-12 * scale, "{div}");
            }
        }
    }
}
