use crate::error::{Error, Result};
use crate::fields::{advective_term, perp_gradient, AdvectionForm, Padded, SobolevIndex, VectorField};
use crate::scalar::Real;
use crate::stokes::{solve_stokes, velocity_and_forcing, StokesSolution};

/// Whether the quadratic terms are evaluated. `Off` leaves pure resistive
/// diffusion, used as a diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Nonlinearity {
    #[default]
    On,
    Off,
}

/// The right-hand side together with the diagnostics computed on the way.
#[derive(Clone, Debug)]
pub struct RhsEval<T: Real> {
    /// The quadratic part `Π[(B·∇)u - (u·∇)B]`.
    pub nonlinear: VectorField<T>,
    pub u: VectorField<T>,
    /// `ν‖∇u‖²`.
    pub dissipation_u: T,
    /// `η‖∇B‖²`.
    pub dissipation_b: T,
    /// `max |u|` over the samples of the 3/2-padded grid.
    pub max_u: T,
}

impl<T: Real> RhsEval<T> {
    /// `ηΔB + nonlinear`.
    pub fn total(&self, b: &VectorField<T>, eta: T) -> VectorField<T> {
        let mut out = b.laplacian().scaled(eta);
        out.axpy(T::one(), &self.nonlinear);
        out
    }
}

/// Evaluates the nonlinear part and the dissipation rates at `b`.
///
/// In two dimensions `(B·∇)u - (u·∇)B = ∇⊥(B₁u₂ - u₁B₂)` for solenoidal
/// fields, so the term is formed from one dealiased scalar product and is
/// divergence-free by construction.
pub fn evaluate_rhs<T: Real>(b: &VectorField<T>, nu: T, eta: T, mode: Nonlinearity) -> Result<RhsEval<T>> {
    let grid = b.grid();
    let dissipation_b = eta * b.gradient_norm_sq();
    match mode {
        Nonlinearity::Off => Ok(RhsEval {
            nonlinear: VectorField::zeros(grid),
            u: VectorField::zeros(grid),
            dissipation_u: T::zero(),
            dissipation_b,
            max_u: T::zero(),
        }),
        Nonlinearity::On => {
            b.check_divergence_free()?;
            // B⊗B is symmetric, so three padded products give ∇·(B⊗B)
            let (bx, by) = (Padded::of(&b.x), Padded::of(&b.y));
            let xx = Padded::product(&bx, &bx).into_field(grid);
            let xy = Padded::product(&bx, &by).into_field(grid);
            let yy = Padded::product(&by, &by).into_field(grid);
            let forcing = VectorField::new(&xx.dx() + &xy.dy(), &xy.dx() + &yy.dy())?;
            let StokesSolution { u, .. } = solve_stokes(&forcing, nu)?;
            let (ux, uy) = (Padded::of(&u.x), Padded::of(&u.y));
            let max_u = ux
                .data
                .iter()
                .zip(&uy.data)
                .fold(T::zero(), |m, (p, q)| m.max((p.re * p.re + q.re * q.re).sqrt()));
            let mut a = Padded::product(&bx, &uy);
            a.sub_product(&ux, &by);
            let nonlinear = perp_gradient(&a.into_field(grid));
            Ok(RhsEval {
                nonlinear,
                dissipation_u: nu * u.gradient_norm_sq(),
                dissipation_b,
                max_u,
                u,
            })
        }
    }
}

/// `ηΔB + Π[(B·∇)u - (u·∇)B]` with `u` slaved to `B`.
pub fn rhs<T: Real>(b: &VectorField<T>, nu: T, eta: T) -> Result<VectorField<T>> {
    Ok(evaluate_rhs(b, nu, eta, Nonlinearity::On)?.total(b, eta))
}

/// `‖∂B/∂t‖_{H⁻¹} / (η‖B‖_{H¹} + 2‖B‖_{L⁴}‖u‖_{L⁴})`; at most one.
pub fn dbdt_hminus1_bound_check<T: Real>(b: &VectorField<T>, nu: T, eta: T, mode: Nonlinearity) -> Result<T> {
    let (lhs, rhs) = dbdt_hminus1_bound_sides(b, nu, eta, mode)?;
    Ok(lhs / rhs)
}

/// Both sides of the `H⁻¹` bound on `∂B/∂t`.
pub fn dbdt_hminus1_bound_sides<T: Real>(b: &VectorField<T>, nu: T, eta: T, mode: Nonlinearity) -> Result<(T, T)> {
    if b.max_coeff_abs() == T::zero() {
        return Err(Error::Degenerate("zero magnetic field".into()));
    }
    let e = evaluate_rhs(b, nu, eta, mode)?;
    let lhs = e.total(b, eta).sobolev_norm(SobolevIndex::H_MINUS_1);
    let rhs = eta * b.sobolev_norm(SobolevIndex::H1) + T::c(2.0) * b.l4_norm_exact() * e.u.l4_norm_exact();
    if !(rhs > T::zero()) {
        return Err(Error::Degenerate("bound vanishes".into()));
    }
    Ok((lhs, rhs))
}

/// The two cancellations behind the energy identity, each relative to its
/// Cauchy–Schwarz scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cancellations<T: Real> {
    /// `|⟨Π[(u·∇)B], B⟩| / (‖(u·∇)B‖ ‖B‖)`.
    pub transport: T,
    /// `|⟨Π[(B·∇)u], B⟩ + ⟨(B·∇)B, u⟩| / (‖(B·∇)u‖ ‖B‖ + ‖(B·∇)B‖ ‖u‖)`.
    pub stretching: T,
}

pub fn cancellations<T: Real>(b: &VectorField<T>, nu: T) -> Result<Cancellations<T>> {
    let (s, forcing) = velocity_and_forcing(b, nu)?;
    let u = &s.u;
    let transport_term = advective_term(u, b, AdvectionForm::Advective)?;
    let stretch_term = advective_term(b, u, AdvectionForm::Advective)?;
    let ratio = |num: T, den: T| if den > T::zero() { num.abs() / den } else { num.abs() };
    let bn = b.l2_norm();
    let transport = ratio(transport_term.leray_project().inner(b), transport_term.l2_norm() * bn);
    let stretching = ratio(
        stretch_term.leray_project().inner(b) + forcing.inner(u),
        stretch_term.l2_norm() * bn + forcing.l2_norm() * u.l2_norm(),
    );
    Ok(Cancellations { transport, stretching })
}
