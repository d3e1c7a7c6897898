use thiserror::Error;

/// Errors raised by the analysis engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A caller passed an identifier or value outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A channel/actuator/counter value violates its invariants.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// The supervisor is undefined on a string the plant can generate.
    #[error("supervisor does not cover the plant: {0}")]
    ModelCoverage(String),

    /// Exploration exceeded the configured state cap.
    #[error("extended state space exceeds the cap of {cap} states")]
    ResourceLimit { cap: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
