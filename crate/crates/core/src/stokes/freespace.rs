//! Midpoint-rule convolution with the free-space Green's tensor.

use rayon::prelude::*;

use super::greens::greens_eval;
use super::periodic::solve_stokes;
use crate::error::{Error, Result};
use crate::fields::{SpectralField, VectorField};
use crate::grid::TorusGrid;
use crate::lorentz::Rearrangement;

/// A tensor `f_kj` sampled at the cell centres of an `m × m` box of side
/// `box_size` centred on the origin. Component order is `f11, f12, f21, f22`,
/// each row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxTensor {
    pub m: usize,
    pub box_size: f64,
    pub f: [Vec<f64>; 4],
}

impl BoxTensor {
    pub fn cell(&self) -> f64 {
        self.box_size / self.m as f64
    }

    /// Centre of cell `(ix, iy)`.
    pub fn point(&self, ix: usize, iy: usize) -> [f64; 2] {
        let h = self.cell();
        let lo = -0.5 * self.box_size + 0.5 * h;
        [lo + ix as f64 * h, lo + iy as f64 * h]
    }

    pub fn from_fn(m: usize, box_size: f64, f: impl Fn(f64, f64) -> [f64; 4]) -> Self {
        let mut out = Self {
            m,
            box_size,
            f: [vec![0.0; m * m], vec![0.0; m * m], vec![0.0; m * m], vec![0.0; m * m]],
        };
        for iy in 0..m {
            for ix in 0..m {
                let [x, y] = out.point(ix, iy);
                let v = f(x, y);
                for (comp, value) in out.f.iter_mut().zip(v) {
                    comp[iy * m + ix] = value;
                }
            }
        }
        out
    }

    /// `B⊗B` from two sampled components.
    pub fn outer(m: usize, box_size: f64, bx: &[f64], by: &[f64]) -> Self {
        let prod = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).collect::<Vec<f64>>();
        Self {
            m,
            box_size,
            f: [prod(bx, bx), prod(bx, by), prod(by, bx), prod(by, by)],
        }
    }

    /// `∫ |f|` with the Frobenius norm of the tensor.
    pub fn l1_norm(&self) -> f64 {
        let h2 = self.cell() * self.cell();
        (0..self.m * self.m)
            .map(|i| (0..4).map(|c| self.f[c][i] * self.f[c][i]).sum::<f64>().sqrt())
            .sum::<f64>()
            * h2
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        for c in out.f.iter_mut() {
            c.iter_mut().for_each(|v| *v *= a);
        }
        out
    }

    /// Whether any cell on the outer ring is non-zero.
    pub fn touches_boundary(&self) -> bool {
        let m = self.m;
        let on_edge = |i: usize| {
            let (ix, iy) = (i % m, i / m);
            ix == 0 || iy == 0 || ix == m - 1 || iy == m - 1
        };
        (0..m * m).any(|i| on_edge(i) && self.f.iter().any(|c| c[i] != 0.0))
    }
}

/// Velocity samples on the box, one vector per cell centre.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxVelocity {
    pub m: usize,
    pub box_size: f64,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
}

impl BoxVelocity {
    pub fn magnitude(&self) -> Vec<f64> {
        self.ux.iter().zip(&self.uy).map(|(a, b)| a.hypot(*b)).collect()
    }

    /// `‖u‖_{L^{2,∞}}` over the box with cell measure `h²`.
    pub fn weak_l2(&self) -> f64 {
        let h = self.box_size / self.m as f64;
        Rearrangement::from_samples(&self.magnitude(), h * h).weak_lp(2.0).value
    }
}

/// `u = U ∗ (∇·f)`, integrated by parts to
/// `u_i(x) = Σ_jk ∫ (∂_k U_ij)(x - y) f_kj(y) dy` (the derivative falls on
/// the argument), by the midpoint rule over the cells where `f` is
/// non-zero. The cell containing `x` is skipped.
pub fn solve_stokes_freespace(f: &BoxTensor, nu: f64) -> Result<BoxVelocity> {
    let all: Vec<usize> = (0..f.m * f.m).collect();
    let (ux, uy) = freespace_at(f, nu, &all)?.into_iter().unzip();
    Ok(BoxVelocity {
        m: f.m,
        box_size: f.box_size,
        ux,
        uy,
    })
}

/// The quadrature evaluated only at the listed cell indices.
pub fn freespace_at(f: &BoxTensor, nu: f64, cells: &[usize]) -> Result<Vec<(f64, f64)>> {
    if f.touches_boundary() {
        return Err(Error::SupportTouchesBoundary);
    }
    if !(nu > 0.0) {
        return Err(Error::param("nu", format!("must be > 0, got {nu}")));
    }
    let m = f.m;
    let h2 = f.cell() * f.cell();
    let sources: Vec<(usize, [f64; 2], [f64; 4])> = (0..m * m)
        .filter_map(|i| {
            let v = [f.f[0][i], f.f[1][i], f.f[2][i], f.f[3][i]];
            (v != [0.0; 4]).then(|| (i, f.point(i % m, i / m), v))
        })
        .collect();
    Ok(cells
        .par_iter()
        .map(|&i| {
            let x = f.point(i % m, i / m);
            let mut u = [0.0f64; 2];
            for &(j, y, fy) in &sources {
                if j == i {
                    continue;
                }
                let g = greens_eval([x[0] - y[0], x[1] - y[1]], nu).expect("distinct cell centres");
                for (ui, gi) in u.iter_mut().zip(&g.grad_u) {
                    for (jj, gij) in gi.iter().enumerate() {
                        for (k, d) in gij.iter().enumerate() {
                            *ui += d * fy[2 * k + jj];
                        }
                    }
                }
            }
            (u[0] * h2, u[1] * h2)
        })
        .collect())
}

/// The same problem solved spectrally on the torus of side `box_size`
/// whose grid points are the box cell centres. Image contributions make it
/// differ from the free-space solution by `O(box_size⁻³)` when `f` has
/// vanishing zeroth and first moments.
pub fn periodic_oracle(f: &BoxTensor, nu: f64) -> Result<BoxVelocity> {
    let grid = TorusGrid::<f64>::new(f.m)?;
    let comp = |c: usize| SpectralField::from_physical(&grid, &f.f[c]);
    let (f11, f12, f21, f22) = (comp(0)?, comp(1)?, comp(2)?, comp(3)?);
    // unit-torus variables: ∇_ξ = L ∇_x, so ν becomes ν/L
    let g = VectorField::new(&f11.dx() + &f21.dy(), &f12.dx() + &f22.dy())?;
    let s = solve_stokes(&g, nu / f.box_size)?;
    Ok(BoxVelocity {
        m: f.m,
        box_size: f.box_size,
        ux: s.u.x.to_physical(),
        uy: s.u.y.to_physical(),
    })
}

/// `‖f ∗ g‖_{L^{q,∞}} / (‖f‖_{L¹} ‖g‖_{L^{r,∞}})`.
pub fn check_weak_young(f_l1_norm: f64, g_quasinorm: f64, conv_quasinorm: f64) -> Result<f64> {
    let den = f_l1_norm * g_quasinorm;
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::Degenerate(format!("denominator {den}")));
    }
    Ok(conv_quasinorm / den)
}

/// Weak-`L²` quasinorm bound of every `∂_k U_ij`: `1/(ν√π)`.
pub fn greens_gradient_quasinorm(nu: f64) -> f64 {
    1.0 / (nu * std::f64::consts::PI.sqrt())
}

/// Polynomial bump `(1 - r²/R²)^p` on `r < R`.
pub fn bump(x: f64, y: f64, radius: f64, power: i32) -> f64 {
    let s = 1.0 - (x * x + y * y) / (radius * radius);
    if s > 0.0 {
        s.powi(power)
    } else {
        0.0
    }
}

/// Manufactured forcing `f_kj = A_kj ∂₁∂₂φ` for a bump `φ = (1 - r²/R²)⁸`
/// centred at the origin. All moments of order below two vanish.
pub fn manufactured_forcing(m: usize, box_size: f64, radius: f64) -> BoxTensor {
    const A: [f64; 4] = [1.0, 0.5, -0.3, 2.0];
    let r2 = radius * radius;
    BoxTensor::from_fn(m, box_size, |x, y| {
        let s = 1.0 - (x * x + y * y) / r2;
        // ∂₁∂₂ s⁸ = 8·7 s⁶ (4xy/R⁴)
        let v = if s > 0.0 { 56.0 * s.powi(6) * 4.0 * x * y / (r2 * r2) } else { 0.0 };
        A.map(|a| a * v)
    })
}

/// Interior comparison of the free-space solver with the periodic oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub m: usize,
    pub cell: f64,
    /// `max |u_free - u_periodic| / max |u_periodic|` over the interior.
    pub relative_error: f64,
}

/// Compares the two solvers on `|x| < interior` for the manufactured
/// forcing.
pub fn compare_with_oracle(m: usize, box_size: f64, radius: f64, interior: f64, nu: f64) -> Result<OracleComparison> {
    let f = manufactured_forcing(m, box_size, radius);
    let cells: Vec<usize> = (0..m * m)
        .filter(|&i| {
            let [x, y] = f.point(i % m, i / m);
            x.hypot(y) < interior
        })
        .collect();
    let free = freespace_at(&f, nu, &cells)?;
    let per = periodic_oracle(&f, nu)?;
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for (&i, &(ux, uy)) in cells.iter().zip(&free) {
        err = err.max((ux - per.ux[i]).hypot(uy - per.uy[i]));
        scale = scale.max(per.ux[i].hypot(per.uy[i]));
    }
    Ok(OracleComparison {
        m,
        cell: f.cell(),
        relative_error: err / scale,
    })
}

/// Least-squares slope of `ln err` against `ln h`.
pub fn observed_order(results: &[OracleComparison]) -> f64 {
    let pts: Vec<(f64, f64)> = results.iter().map(|r| (r.cell.ln(), r.relative_error.ln())).collect();
    crate::report::fit_slope(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_forcing_gives_zero() {
        let f = BoxTensor::from_fn(16, 2.0, |_, _| [0.0; 4]);
        let u = solve_stokes_freespace(&f, 1.0).unwrap();
        assert!(u.ux.iter().chain(&u.uy).all(|&v| v == 0.0));
    }

    #[test]
    fn support_on_boundary_is_rejected() {
        let f = BoxTensor::from_fn(16, 2.0, |_, _| [1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(solve_stokes_freespace(&f, 1.0), Err(Error::SupportTouchesBoundary)));
    }

    #[test]
    fn linear_in_forcing_and_young_ratio_invariant() {
        let f = manufactured_forcing(32, 2.0, 0.6);
        let u1 = solve_stokes_freespace(&f, 1.0).unwrap();
        let u2 = solve_stokes_freespace(&f.scaled(2.0), 1.0).unwrap();
        for (a, b) in u1.ux.iter().zip(&u2.ux) {
            assert!((2.0 * a - b).abs() <= 1e-14 * b.abs().max(1e-300));
        }
        let g = greens_gradient_quasinorm(1.0);
        let r1 = check_weak_young(f.l1_norm(), g, u1.weak_l2()).unwrap();
        let r2 = check_weak_young(f.scaled(2.0).l1_norm(), g, u2.weak_l2()).unwrap();
        assert!((r1 - r2).abs() < 1e-13 * r1);
        assert!(check_weak_young(0.0, g, 0.0).is_err());
    }

    #[test]
    fn viscosity_scales_velocity() {
        let f = manufactured_forcing(24, 2.0, 0.6);
        let a = solve_stokes_freespace(&f, 1.0).unwrap();
        let b = solve_stokes_freespace(&f, 4.0).unwrap();
        for (p, q) in a.uy.iter().zip(&b.uy) {
            assert!((p - 4.0 * q).abs() <= 1e-13 * p.abs().max(1e-300));
        }
    }
}
