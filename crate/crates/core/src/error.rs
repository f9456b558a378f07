use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported spatial dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("signal speed must be positive and finite, got {0}")]
    InvalidSignalSpeed(f64),

    #[error("boost velocity {v} is not below the signal speed {c}")]
    SuperluminalBoost { v: f64, c: f64 },

    #[error("negative duration {0}")]
    NegativeDuration(f64),

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("empty box on axis {axis}: [{lo}, {hi}]")]
    EmptyBox { axis: usize, lo: f64, hi: f64 },

    #[error("region must be nonempty")]
    EmptyRegion,

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("conditioning on an event of mass {0} (below tolerance)")]
    NullConditioning(f64),

    #[error("incompatible discretisations: {0}")]
    IncompatibleMeasures(String),

    #[error("slices are time-reversed: mu at {mu_time}, nu at {nu_time}")]
    TimeReversed { mu_time: f64, nu_time: f64 },

    #[error("instance too large for {method}: {size} > {limit}")]
    TooLarge {
        method: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("parameter {name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("boundary density {density:e} exceeds the padding guard {limit:e}")]
    BoundaryLeak { density: f64, limit: f64 },

    #[error("no signalling witness present")]
    NoWitness,

    #[error("no readout event found on the lattice {0}")]
    NoReadoutEvent(String),

    #[error("could not cover K with sender events on the lattice {0}")]
    NoSenderCover(String),

    #[error("protocol invariant violated: {0}")]
    ProtocolInvariant(String),

    #[error("channel gap is zero")]
    ZeroGap,

    #[error("invalid scenario: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
