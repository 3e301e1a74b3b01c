//! The elliptic half of the system: spectral Stokes solves on the torus,
//! the free-space fundamental solution and a quadrature convolution solver.

mod freespace;
mod greens;
mod periodic;

pub use freespace::{
    bump, check_weak_young, compare_with_oracle, greens_gradient_quasinorm, manufactured_forcing, observed_order,
    freespace_at, periodic_oracle, solve_stokes_freespace, BoxTensor, BoxVelocity, OracleComparison,
};
pub use greens::{greens_bound_sweep, greens_eval, greens_sample_points, GreensEval};
pub use periodic::{solve_stokes, velocity_from_b, StokesSolution};
pub(crate) use periodic::velocity_and_forcing;
