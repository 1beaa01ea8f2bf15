//! Crate-wide error type.

use thiserror::Error;

use crate::mesh::DefectReport;

/// Errors produced by mesh loading, validation, transforms and field I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A file did not parse under its declared format.
    #[error("parse error in {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Mesh invariant violation (bad indices, mixed degrees, non-finite data).
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    /// Boundary validation failed; the report lists offending elements.
    #[error("boundary validation failed: {0}")]
    Boundary(DefectReport),

    /// Two sigma values (or a sigma and zero, on the auxiliary-node path)
    /// were closer than the separation threshold. The caller should jitter.
    #[error("sigma collision at element {element} (|separation| = {separation:.3e}); vertex jitter required")]
    SigmaCollision { element: usize, separation: f64 },

    /// Squared-distance matrix produced a negative radicand beyond tolerance.
    #[error("inconsistent simplex distances: radicand {radicand:.3e} below -1e-12")]
    NegativeRadicand { radicand: f64 },

    /// A spectrum failed the Hermitian-symmetry residue check.
    #[error("non-Hermitian spectrum: imaginary residue {residue:.3e} exceeds {threshold:.3e}")]
    NonHermitian { residue: f64, threshold: f64 },

    /// Header/payload mismatch or unrecognized file structure.
    #[error("bad file {path}: {message}")]
    BadFile { path: String, message: String },

    /// Request outside the supported parameter space.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(path: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }

    /// True for errors that one re-jitter attempt may resolve.
    pub fn is_sigma_collision(&self) -> bool {
        matches!(self, Error::SigmaCollision { .. })
    }
}
