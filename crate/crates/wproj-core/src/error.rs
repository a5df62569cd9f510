//! Error type shared by every module of the crate.

use thiserror::Error;

/// All failure modes of the library.
///
/// The CLI groups these into two exit classes: domain errors (a valid request
/// hit a mathematical boundary) and usage errors (the request itself was
/// malformed). [`Error::is_domain`] encodes that split.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Scaling by a (numerically) zero scalar is not a group element.
    #[error("ZeroScalar: scaling factor has modulus {modulus:e}, below the nonzero threshold")]
    ZeroScalar { modulus: f64 },

    /// Two values that must share dimensions do not.
    #[error("DimMismatch: {0}")]
    DimMismatch(String),

    /// A point left, or never was in, the open domain of nonzero blocks.
    #[error("DomainViolation: {0}")]
    DomainViolation(String),

    /// Chart pivot too close to zero for a stable division.
    #[error("PivotTooSmall: pivot {index} has modulus {modulus:e} (threshold {threshold:e})")]
    PivotTooSmall {
        index: usize,
        modulus: f64,
        threshold: f64,
    },

    /// Input matrix is not rank one within the requested tolerance.
    #[error("NotRankOne: relative rank-one residual {ratio:e} exceeds rtol {rtol:e}")]
    NotRankOne { ratio: f64, rtol: f64 },

    /// Input matrix is numerically zero.
    #[error("ZeroMatrix: largest entry modulus {max_modulus:e} is below the nonzero threshold")]
    ZeroMatrix { max_modulus: f64 },

    /// The level quadratic has no positive real root for |lambda|^2.
    #[error("NoRealRoot: no positive root for |lambda|^2 (alpha = {alpha}, discriminant = {discriminant})")]
    NoRealRoot { alpha: f64, discriminant: f64 },

    /// Finite-difference step too small to be meaningful in f64.
    #[error("StepTooSmall: h = {h:e} is below 1e-12")]
    StepTooSmall { h: f64 },

    /// Two values that must live on the same frame do not.
    #[error("FrameMismatch: {0}")]
    FrameMismatch(String),

    /// A verification check name outside the registry.
    #[error("UnknownCheck: {0}")]
    UnknownCheck(String),

    /// A witness string that does not deserialize for the named check.
    #[error("BadWitness: check {check}: {reason}")]
    BadWitness { check: String, reason: String },

    /// Configuration outside its documented bounds.
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for errors where a well-formed request hit a mathematical
    /// boundary, as opposed to a malformed request.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::ZeroScalar { .. }
                | Error::DomainViolation(_)
                | Error::PivotTooSmall { .. }
                | Error::NotRankOne { .. }
                | Error::ZeroMatrix { .. }
                | Error::NoRealRoot { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
