use thiserror::Error;

/// Errors produced by the extended convolution engine and its applications.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numeric parameter is out of its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Two inputs that must share a shape do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A real-valued field was required.
    #[error("{0} requires real field")]
    NotReal(&'static str),

    /// The transformation field or filter belongs to a different group than the operation.
    #[error("group mismatch: expected {expected}, found {found}")]
    GroupMismatch {
        expected: &'static str,
        found: &'static str,
    },

    /// A per-pixel scale factor lies outside the representable band of a scale filter.
    #[error("scale {scale} at pixel ({x}, {y}) lies outside the guard band [{lo}, {hi}]")]
    ScaleOutOfBand {
        x: usize,
        y: usize,
        scale: f64,
        lo: f64,
        hi: f64,
    },

    /// A quaternion is not unit-norm within tolerance.
    #[error("quaternion norm {0} is not unit")]
    NonUnitQuaternion(f64),

    /// The filter has zero integral so weighted averaging is undefined.
    #[error("normalization undefined: filter integral is zero")]
    NormalizationUndefined,

    /// A pattern or contour region carries no gradient / contour support.
    #[error("degenerate pattern: {0}")]
    Degenerate(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
