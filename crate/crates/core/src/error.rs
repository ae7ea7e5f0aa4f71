//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors surfaced by the core operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model parameter violates its invariant.
    InvalidModel(String),
    /// The simulation grid is too coarse to resolve the interferometer delay.
    Resolution(String),
    /// Not enough distinct data to determine a fit.
    Underdetermined(String),
    /// Fit parameters make the requested quantity meaningless.
    DegenerateFit(String),
    /// Input smaller than the documented floor.
    InsufficientData { needed: usize, got: usize },
    /// All samples equal; the normalization map is undefined.
    DegenerateRange,
    /// Extraction ratio outside (0, 1].
    RatioOutOfRange(f64),
    /// Estimated min-entropy leaves nothing to extract.
    NoExtractableEntropy,
    /// Bit-length contract violated.
    LengthMismatch { expected: usize, got: usize },
    /// Provided seed material shorter than the required n + m - 1 bits.
    SeedTooShort { needed: usize, got: usize },
    /// Structurally impossible extractor geometry.
    BadGeometry(String),
    /// Requested frequency band contains no PSD bins.
    EmptyBand,
    /// Operation requires a non-empty input.
    EmptyInput,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidModel(what) => write!(f, "invalid model: {what}"),
            Error::Resolution(what) => write!(f, "resolution error: {what}"),
            Error::Underdetermined(what) => write!(f, "underdetermined: {what}"),
            Error::DegenerateFit(what) => write!(f, "degenerate fit: {what}"),
            Error::InsufficientData { needed, got } => {
                write!(f, "insufficient data: need at least {needed}, got {got}")
            }
            Error::DegenerateRange => write!(f, "degenerate range: all samples are equal"),
            Error::RatioOutOfRange(r) => {
                write!(f, "extraction ratio {r} outside (0, 1]")
            }
            Error::NoExtractableEntropy => write!(f, "no extractable entropy"),
            Error::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected} bits, got {got}")
            }
            Error::SeedTooShort { needed, got } => {
                write!(f, "seed material too short: need {needed} bits, got {got}")
            }
            Error::BadGeometry(what) => write!(f, "bad geometry: {what}"),
            Error::EmptyBand => write!(f, "frequency band contains no bins"),
            Error::EmptyInput => write!(f, "empty input"),
        }
    }
}

#[cfg(any(test, feature = "std"))]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
