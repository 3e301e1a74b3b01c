use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is invalid: must be even and at least 4")]
    InvalidGrid(usize),

    #[error("grid mismatch: expected n = {expected}, found n = {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("field is not divergence-free (relative defect {defect:e})")]
    NotDivergenceFree { defect: f64 },

    #[error("projected forcing has nonzero mean ({magnitude:e})")]
    NonzeroMeanForcing { magnitude: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("field is not band-limited to kappa = {kappa} (found |k| = {found})")]
    NotBandLimited { kappa: f64, found: f64 },

    #[error("unknown initial-data kind `{0}`")]
    UnknownInitKind(String),

    #[error("malformed snapshot: {0}")]
    MalformedSnapshot(String),

    #[error("time step {dt:e} violates the CFL limit; admissible dt <= {admissible:e}")]
    Cfl { dt: f64, admissible: f64 },

    #[error("non-finite value detected at step {step}")]
    NonFinite { step: usize },

    #[error("forcing support touches the sampling box boundary")]
    SupportTouchesBoundary,

    #[error("need at least {needed} samples, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
