//! Spectral fields on the unit torus.

mod init;
mod product;
mod snapshot;
mod spectral;
mod state;
mod vector;

pub use init::{corpus_exponent, init_field, random_sobolev, taylor_green, InitKind};
pub use product::dealiased_product;
pub(crate) use product::Padded;
pub use snapshot::{Snapshot, MAGIC as SNAPSHOT_MAGIC, VERSION as SNAPSHOT_VERSION};
pub use snapshot::write_atomic;
pub use spectral::{SobolevIndex, SpectralField};
pub(crate) use spectral::lp_norm_of_samples;
pub use state::FlowState;
pub use vector::{
    advective_term, divergence, gradient, laplacian, leray_project, perp_gradient, tensor_product, AdvectionForm,
    Tensor, VectorField, DIVERGENCE_TOLERANCE,
};

/// Physical samples of a scalar field.
pub fn to_physical<T: crate::Real>(f: &SpectralField<T>) -> Vec<T> {
    f.to_physical()
}

/// Scalar field from physical samples.
pub fn from_physical<T: crate::Real>(grid: &crate::TorusGrid<T>, samples: &[T]) -> crate::Result<SpectralField<T>> {
    SpectralField::from_physical(grid, samples)
}

/// `(Σ_k (1 + 4π²|k|²)^s |v̂(k)|²)^{1/2}`.
pub fn sobolev_norm<T: crate::Real>(v: &VectorField<T>, s: SobolevIndex) -> T {
    v.sobolev_norm(s)
}
