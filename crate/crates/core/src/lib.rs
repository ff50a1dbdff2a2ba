//! Quantum correlations in time, computed five ways.
//!
//! The crate evaluates temporal correlations of small quantum systems in the
//! pseudo-density-matrix picture and cross-checks them against process
//! matrices with indefinite causal order, decoherence functionals of
//! consistent histories, quantum-classical signalling games, and
//! out-of-time-order correlators. A Euclidean lattice oracle for the harmonic
//! oscillator quantifies how amplitude-weighted path-integral correlators
//! part ways with all of the above.
//!
//! Everything is dense, double precision, and desk scale (total dimension
//! ≤ 2¹⁰). All operations are pure functions of immutable inputs.

pub mod causal;
pub mod eig;
pub mod games;
pub mod histories;
pub mod matrix;
pub mod oscillator;
pub mod otoc;
pub mod pauli;
pub mod pdm;
pub mod procmat;
pub mod random;
pub mod space;
pub mod stats;
pub mod verify;

pub use matrix::CMatrix;
pub use pauli::PauliString;
pub use space::SpaceSpec;

use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },
    #[error("operator is not a projector (max deviation {deviation:.3e})")]
    NotAProjector { deviation: f64 },
    #[error("invalid quantum state: {0}")]
    InvalidState(String),
    #[error("invalid quantum channel: {0}")]
    InvalidChannel(String),
    #[error("invalid instrument: {0}")]
    InvalidInstrument(String),
    #[error("postselection has vanishing probability")]
    ImpossiblePostselection,
    #[error("correlation undefined: a sample has zero variance")]
    ZeroVariance,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("enumeration size {requested} exceeds limit {limit}")]
    SizeLimit { requested: usize, limit: usize },
    #[error("invalid coarse-graining partition: {0}")]
    InvalidPartition(String),
    #[error("outcome labels must be ±1, found {0}")]
    OutcomeLabels(i32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
