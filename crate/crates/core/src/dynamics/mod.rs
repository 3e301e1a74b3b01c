//! Time evolution of the Fourier-truncated induction equation with the
//! velocity slaved through the Stokes solve, and its energy ledger.

mod integrate;
mod rhs;

pub use integrate::{integrate, step, EnergyLedger, GalerkinConfig, Integrator, Observer};
pub use rhs::{cancellations, dbdt_hminus1_bound_check, dbdt_hminus1_bound_sides, evaluate_rhs, rhs, Cancellations, Nonlinearity, RhsEval};
