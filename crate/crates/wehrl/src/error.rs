//! Error type shared by every module.

use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// `CheckFailed` is special: it marks an internal numerical cross-check that
/// exceeded its tolerance, i.e. a bug or a genuinely pathological input, not
/// a malformed argument. The CLI maps it to a distinct exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WehrlError {
    /// Every amplitude is numerically zero; there is no state to analyze.
    #[error("degenerate state: all amplitudes below 1e-14")]
    DegenerateState,

    /// An amplitude or point sequence has the wrong length for its spin.
    #[error("count mismatch: expected {expected} entries, got {got}")]
    CountMismatch { expected: usize, got: usize },

    /// The computation needs binomial coefficients beyond the f64-safe range.
    #[error("ceiling exceeded: effective 2j = {twice_j} is above the supported maximum of 60")]
    CeilingExceeded { twice_j: u64 },

    /// Spin 0 is excluded: it has no points and a trivial phase space.
    #[error("twice_j must be at least 1 (spin 0 is excluded)")]
    SpinZero,

    /// A state vector whose norm is too far from 1 to silently fix.
    #[error("state not normalized: sum |psi_m|^2 = {norm_sq} differs from 1 by more than 1e-9")]
    NotNormalized { norm_sq: f64 },

    /// Chord-square parameters admit no realization as points on the sphere.
    #[error("not embeddable: {0}")]
    NotEmbeddable(String),

    /// A chord relation divides by zero for these parameters.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// An input number is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An internal numerical cross-check failed beyond its tolerance.
    #[error("numerical check failed: {what} = {value:e} exceeds tolerance {tolerance:e}")]
    CheckFailed {
        what: &'static str,
        value: f64,
        tolerance: f64,
    },
}
