//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or vector dimensions do not line up for the requested operation.
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    /// Invalid geometric input (coincident sites, degenerate orientation, ...).
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// An input left the validity region of a model.
    #[error("{quantity} = {value} outside model validity ({bound})")]
    OutOfValidity {
        quantity: &'static str,
        value: f64,
        bound: &'static str,
    },

    /// A tabulated pattern was queried outside its grid.
    #[error("pattern lookup outside tabulated grid: {0}")]
    PatternDomain(String),

    /// An element of a RIS control vector is not unit modulus.
    #[error("RIS control element {index} has modulus {modulus}, expected 1")]
    UnitModulus { index: usize, modulus: f64 },

    /// Scattering pattern requested but the triple carries no angle metadata.
    #[error("non-isotropic scattering pattern requires RIS incidence/reflection angles")]
    MissingRisAngles,

    /// Water-filling over a gain vector with no positive entry.
    #[error("water-filling requires at least one positive gain")]
    AllZeroGains,

    /// A transmit covariance failed the Hermitian-PSD check.
    #[error("covariance is not Hermitian positive semidefinite: {0}")]
    NotPsd(String),

    /// Invalid optimizer options.
    #[error("invalid optimizer options: {0}")]
    InvalidOptions(String),

    /// Invalid run configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A channel matrix contains NaN or infinite entries.
    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    /// Failure while generating one Monte-Carlo drop.
    #[error("drop {index} failed: {source}")]
    Drop {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    /// I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
