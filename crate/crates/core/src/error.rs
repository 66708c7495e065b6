use thiserror::Error;

/// Errors raised by the design, evolution, phase and gate routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numeric argument was NaN or infinite.
    #[error("invalid argument: {name} = {value} is not finite")]
    NonFinite { name: &'static str, value: f64 },

    /// A parameter lies outside its admissible range.
    #[error("{name} = {value} outside admissible interval {interval}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        interval: &'static str,
    },

    /// A count-valued parameter violates its lower bound or parity rule.
    #[error("{name} = {value}: {requirement}")]
    BadCount {
        name: &'static str,
        value: usize,
        requirement: &'static str,
    },

    /// The overlap between two states is too small for its argument to mean anything.
    #[error("phase undefined: overlap magnitude {overlap:e} below {threshold:e}")]
    UndefinedPhase { overlap: f64, threshold: f64 },

    /// Simpson quadrature needs an odd number of uniformly spaced samples.
    #[error("dynamic phase needs an odd sample count of at least 3, got {0}")]
    EvenSampleCount(usize),

    /// Consecutive Bloch points too far apart to pick a unique geodesic.
    #[error(
        "ambiguous path: points {index} and {next} are separated by {angle} rad (must be < pi/2)"
    )]
    AmbiguousPath {
        index: usize,
        next: usize,
        angle: f64,
    },

    #[error("path marked closed but first and last points differ by {0:e}")]
    OpenPath(f64),

    #[error("matrix is not unitary: max |U^dag U - I| = {0:e}")]
    NonUnitary(f64),

    #[error("gate phase {spec} does not match design phase {design}")]
    PhaseMismatch { spec: f64, design: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            interval: "(0, inf)",
        })
    }
}
