//! Pseudo-spectral solver for the two-dimensional Stokes-magnetic relaxation
//! system on the unit torus, together with numerical checks of the
//! Lorentz-space inequalities, Stokes kernel estimates and energy identities
//! that govern it.
//!
//! The velocity is slaved to the magnetic field through a steady Stokes
//! solve, `-νΔu + ∇p* = (B·∇)B`, and the field evolves by
//! `∂ₜB + (u·∇)B - ηΔB = (B·∇)u` with `∇·u = ∇·B = 0`.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fields;
pub mod grid;
pub mod lorentz;
pub mod report;
pub mod scalar;
pub mod stokes;

pub use error::{Error, Result};
pub use grid::TorusGrid;
pub use scalar::Real;

pub type Grid = grid::TorusGrid<f64>;
pub type Field = fields::SpectralField<f64>;
pub type Vector = fields::VectorField<f64>;
pub type State = fields::FlowState<f64>;
pub type Grid32 = grid::TorusGrid<f32>;
pub type Field32 = fields::SpectralField<f32>;
pub type Vector32 = fields::VectorField<f32>;
