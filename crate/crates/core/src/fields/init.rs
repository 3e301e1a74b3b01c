//! Initial magnetic fields.

use std::path::PathBuf;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::snapshot::Snapshot;
use super::spectral::SpectralField;
use super::vector::{perp_gradient, VectorField};
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::scalar::Real;

/// Initial-data family.
#[derive(Debug, Clone, PartialEq)]
pub enum InitKind {
    /// `B = ∇⊥ψ`, `ψ = sin(2πx) sin(2πy) / 2π`.
    TaylorGreen,
    /// Uniform random phases with `|B̂(k)| = amplitude · |k|^{-exponent}`.
    RandomSobolev { seed: u64, exponent: f64, amplitude: f64 },
    /// Two-component SMHD snapshot.
    FromFile(PathBuf),
}

impl InitKind {
    /// Parses the configuration name of a kind.
    pub fn parse(kind: &str, seed: u64, exponent: f64, path: Option<PathBuf>) -> Result<Self> {
        match kind {
            "taylor_green" => Ok(Self::TaylorGreen),
            "random_sobolev" => Ok(Self::RandomSobolev {
                seed,
                exponent,
                amplitude: 1.0,
            }),
            "from_file" => path
                .map(Self::FromFile)
                .ok_or_else(|| Error::param("init.path", "from_file requires a snapshot path")),
            other => Err(Error::UnknownInitKind(other.to_string())),
        }
    }
}

/// Builds a divergence-free, zero-mean initial field.
pub fn init_field<T: Real>(grid: &TorusGrid<T>, kind: &InitKind) -> Result<VectorField<T>> {
    match kind {
        InitKind::TaylorGreen => Ok(taylor_green(grid)),
        InitKind::RandomSobolev {
            seed,
            exponent,
            amplitude,
        } => Ok(random_sobolev(grid, *seed, *exponent, *amplitude)),
        InitKind::FromFile(path) => {
            let snap = Snapshot::read(path)?;
            if snap.components.len() != 2 {
                return Err(Error::MalformedSnapshot(format!(
                    "expected 2 components, found {}",
                    snap.components.len()
                )));
            }
            if snap.n != grid.n() {
                return Err(Error::GridMismatch {
                    expected: grid.n(),
                    found: snap.n,
                });
            }
            let conv = |c: &[f64]| c.iter().map(|&v| T::c(v)).collect::<Vec<T>>();
            let x = SpectralField::from_physical(grid, &conv(&snap.components[0]))?.without_nyquist();
            let y = SpectralField::from_physical(grid, &conv(&snap.components[1]))?.without_nyquist();
            let mut b = VectorField::new(x, y)?.leray_project();
            b.remove_mean();
            Ok(b)
        }
    }
}

pub fn taylor_green<T: Real>(grid: &TorusGrid<T>) -> VectorField<T> {
    let tp = T::two_pi();
    let psi = SpectralField::from_fn(grid, |x, y| (tp * x).sin() * (tp * y).sin() / tp);
    perp_gradient(&psi.without_nyquist())
}

/// Random field whose phases depend only on `(seed, k)`, so fields drawn
/// on different grids agree on their shared wavenumbers.
pub fn random_sobolev<T: Real>(grid: &TorusGrid<T>, seed: u64, exponent: f64, amplitude: f64) -> VectorField<T> {
    let mut psi = SpectralField::zeros(grid);
    let n = grid.n();
    for iy in 0..n {
        for ix in 0..n {
            if grid.is_nyquist(ix, iy) {
                continue;
            }
            let (kx, ky) = (grid.wavenumber(ix), grid.wavenumber(iy));
            // canonical half plane; the partner gets the conjugate
            if !(ky > 0 || (ky == 0 && kx > 0)) {
                continue;
            }
            let phase = mode_phase(seed, kx, ky);
            let k = ((kx * kx + ky * ky) as f64).sqrt();
            let mag = amplitude * k.powf(-exponent) / (std::f64::consts::TAU * k);
            let c = Complex::new(T::c(mag * phase.cos()), T::c(mag * phase.sin()));
            psi.coeffs_mut()[iy * n + ix] = c;
            psi.coeffs_mut()[grid.conjugate_index(ix, iy)] = c.conj();
        }
    }
    let mut b = perp_gradient(&psi).leray_project();
    b.remove_mean();
    b
}

fn mode_phase(seed: u64, kx: i64, ky: i64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = ((kx as i32 as u32 as u64) << 32) | (ky as i32 as u32 as u64);
    rng.set_stream(stream);
    rng.random_range(0.0..std::f64::consts::TAU)
}

/// Spectral exponent attached to a corpus seed, uniform in `[lo, hi]`.
pub fn corpus_exponent(seed: u64, lo: f64, hi: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    rng.random_range(lo..=hi)
}
