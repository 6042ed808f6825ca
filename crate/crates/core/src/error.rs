use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid transition kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid observation channel: {0}")]
    InvalidChannel(String),

    #[error("model failed validation: {0}")]
    InvalidModel(String),

    #[error("kernel has {classes} closed communicating classes; stationary law is not unique")]
    NonUniqueStationary { classes: usize },

    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("stationary law has zero mass at state {state}")]
    ZeroStationaryMass { state: usize },

    #[error("continuous channel has no sampler")]
    MissingSampler,

    #[error("operation requires a finite-alphabet channel")]
    ContinuousChannel,

    #[error("observation at time {time} does not match the channel")]
    ObservationMismatch { time: usize },

    #[error("observation path is empty")]
    EmptyPath,

    #[error("filter normalizer vanished at time {time}")]
    DegenerateFilter { time: usize },

    #[error("likelihood ratio undefined: zero density in the denominator at time {time}")]
    UndefinedRatio { time: usize },

    #[error("backward variables vanish identically at time {time}")]
    AllZeroRow { time: usize },

    #[error("state {state} is unreachable at time 0 given the observations")]
    UnreachableStart { state: usize },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("prior puts mass on state {state} outside the support of the reference law")]
    SupportViolation { state: usize },

    #[error("enumeration of {paths} paths exceeds the guard of {limit}")]
    SizeGuard { paths: u128, limit: u128 },

    #[error("conditioning event has zero probability")]
    ZeroMassCondition,

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("configuration error: {0}")]
    Config(String),
}
