//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by spectrum, operator, and scan operations.
///
/// Validation of raw inputs is reported by [`crate::params::validate`] as a
/// list of violations rather than an error; `CoreError` covers operations
/// whose preconditions or physics make a result impossible.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// The deformed problem is ill-posed at these parameters (for example an
    /// effective mass or squared frequency that is not positive).
    #[error("ill-posed parameters: {0}")]
    IllPosed(String),

    /// A field/frequency combination outside the domain of the requested
    /// closed form (for example a critical-point formula at zero field).
    #[error("invalid field configuration: {0}")]
    InvalidField(String),

    /// The critical-spectrum operation was called away from the critical
    /// point without an explicit override.
    #[error(
        "not at the critical point: B = {given:.17e} but the closed-form critical field is \
         {expected:.17e} (relative deviation {deviation:.3e}); pass the override to substitute it"
    )]
    NotAtCriticalPoint {
        /// Field value supplied by the caller.
        given: f64,
        /// Closed-form critical field for the remaining parameters.
        expected: f64,
        /// |given - expected| / |expected|.
        deviation: f64,
    },

    /// The per-mode cutoff is too small for the requested construction.
    #[error("cutoff too small: {0}")]
    CutoffTooSmall(String),

    /// A non-positive reference length scale.
    #[error("invalid reference scale l_ref = {0}; it must be > 0")]
    InvalidScale(f64),

    /// An interior-projector margin at or above the per-mode cutoff.
    #[error("invalid margin {margin} for per-mode cutoff {cutoff} (need margin < cutoff)")]
    InvalidMargin {
        /// Requested margin.
        margin: usize,
        /// Per-mode cutoff of the basis.
        cutoff: usize,
    },

    /// Operands on different basis sizes or reference scales.
    #[error("dimension/metadata mismatch: {0}")]
    DimensionMismatch(String),

    /// The matrix handed to the Hermitian eigensolver is not Hermitian
    /// within tolerance.
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds {allowed:.3e}")]
    NotHermitian {
        /// max |M - M^dagger| over all entries.
        defect: f64,
        /// Allowed defect (1e-10 times the largest entry magnitude).
        allowed: f64,
    },

    /// A spectrum table is missing one member of a spin pair.
    #[error("missing spin partner: {0}")]
    MissingPartner(String),

    /// Unknown model identifier.
    #[error("unknown model: {0}")]
    UnknownModel(String),

    /// Unknown sweep/critical parameter name.
    #[error("unknown parameter: {0}")]
    UnknownParameter(String),

    /// No sign change found while bracketing a root.
    #[error("no sign change: {0}")]
    NoSignChange(String),

    /// No closed form is registered for the requested comparison.
    #[error("analytic comparison unavailable: {0}")]
    AnalyticUnavailable(String),

    /// Malformed request (bad enumeration bounds, empty schedule, ...).
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

/// Convenient result alias used across the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
