use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// A digit query or evaluation asked for more digits than a truncated
    /// stream can provide.
    #[error("digit stream depth exceeded: have {depth}, requested {requested}")]
    DepthExceeded { depth: u64, requested: u64 },

    /// Argument outside the mathematical domain of the operation.
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),

    /// A rate-construction target was not admissible.
    #[error("invalid construction target: {0}")]
    InvalidTarget(String),

    /// A numeric slope parameter is too close to a maxima-position
    /// threshold to decide which branch applies; the caller must refine.
    #[error("slope parameter indistinguishable from a position threshold at the working precision")]
    ThresholdAmbiguity,

    /// The precision ladder was exhausted before the requested bracket
    /// width was reached.
    #[error("requested bracket width unreachable within {max_bits} bits of working precision")]
    PrecisionUnreachable { max_bits: u32 },

    /// No point certifying the requested one-sided value gap exists at the
    /// probed scale (the point may be an extremum on that side).
    #[error("no mean-value witness found at scale index {scale_index}")]
    WitnessNotFound { scale_index: usize },

    /// Point-spec or option parse failure.
    #[error("parse error in {input:?} at byte {pos}: {msg}")]
    Parse {
        input: String,
        pos: usize,
        msg: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
