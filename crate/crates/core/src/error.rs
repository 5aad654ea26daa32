use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Domain,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The requested quantity is infinite for these inputs (amplitude
    /// quadrature readout, zero probe power, vanishing LO phase coefficient).
    #[error("divergent configuration: {0}")]
    Divergence(&'static str),

    /// The model only covers a resonant probe; a detuned cavity was supplied.
    #[error("unsupported configuration: {0}")]
    Unsupported(&'static str),

    /// Optimal synodyne sideband ratio has a pole where eps * p * |chi|^2 = 1.
    #[error("branch crossover pole: eps*p*|chi_m|^2 = {0} (no optimal sideband ratio)")]
    BranchPole(f64),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("frequency {value} rad/s outside evaluation grid [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("no peak found in spectrum: {0}")]
    NoPeak(&'static str),

    #[error("fit did not converge after {iterations} iterations (gradient norm {gradient_norm:e}, rms residual {residual_rms:e})")]
    NonConvergence {
        iterations: usize,
        gradient_norm: f64,
        residual_rms: f64,
        best: crate::calibration::Lorentzian,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("row (rho = {rho}, p = {p}, phi = {phi_deg} deg): {source}")]
    Row {
        rho: f64,
        p: f64,
        phi_deg: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed table: {reason}")]
    Parse { path: PathBuf, reason: String },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter { .. } | Error::Config(_) | Error::Shape(_) => {
                ErrorKind::Validation
            }
            Error::Io { .. } | Error::Parse { .. } => ErrorKind::Io,
            Error::Row { source, .. } => source.kind(),
            _ => ErrorKind::Domain,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and >= 0",
        })
    }
}
