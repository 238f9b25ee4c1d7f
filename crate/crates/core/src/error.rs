use alloc::string::String;

/// Errors raised by the models and the drop driver.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A direction fell outside the angular coverage of a tabulated pattern.
    #[error("direction (theta={theta}, phi={phi}) is outside the tabulated pattern grid")]
    OutOfDomain { theta: f64, phi: f64 },

    /// A parameter violated its documented range.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Vectors or matrices whose lengths disagree with the array geometry.
    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A statistic was requested from an empty sample set.
    #[error("empty sample set")]
    EmptySeries,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
