use alloc::string::String;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the documented range of the operation.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Radius beyond the diameter of a positively curved model.
    #[error("radius {r} exceeds the model diameter {diameter}")]
    BeyondDiameter { r: f64, diameter: f64 },

    /// The check only applies to nonnegatively curved (K ≥ 0) data.
    #[error("operation requires curvature bound K >= 0, got K = {0}")]
    WrongCurvature(f64),

    /// Sampled input violates a structural requirement (ordering, sign, length).
    #[error("malformed input: {0}")]
    Malformed(String),

    /// Grid too small or too narrow for the requested computation.
    #[error("insufficient grid: {0}")]
    InsufficientGrid(String),

    /// Parts of a union or paired curves disagree on the dimension.
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(f64, f64),

    /// The quantity is not defined for this kind of space.
    #[error("{quantity} is undefined for {space}")]
    Undefined { quantity: &'static str, space: &'static str },

    /// Operation needs a finite total mass.
    #[error("operation requires finite total mass")]
    InfiniteMass,

    /// A barrier certificate contradicts the barrier bounds.
    #[error("inconsistent certificate: {0}")]
    InconsistentCertificate(String),

    /// Iterative solver stopped before reaching its tolerance.
    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    NonConvergence { iterations: usize, last_change: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
