//! Error types shared across the engine.

use thiserror::Error;

/// Unified error type for all engine operations.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A circuit referenced a qubit outside the register, used an unknown
    /// gate, or was otherwise structurally malformed.
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    /// A simulation was requested that the engine cannot perform
    /// (e.g. statevector beyond the qubit cap, non-Clifford in tableau mode).
    #[error("simulation error: {0}")]
    Simulation(String),

    /// Device lookup/validation failures: unknown device, missing edges,
    /// requested width exceeding the register, missing timing data.
    #[error("device error: {0}")]
    Device(String),

    /// Benchmark parameter validation failed against the declared schema
    /// or an internal protocol invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A benchmark run could not produce a result (e.g. no valid chain,
    /// empty panel, degenerate fit input).
    #[error("benchmark error: {0}")]
    Benchmark(String),

    /// Scoring failed: malformed score table input, unknown benchmark key,
    /// or a baseline that cannot normalize the given values.
    #[error("scoring error: {0}")]
    Scoring(String),

    /// Dataset store failures that are not I/O: malformed record paths,
    /// schema violations on stored payloads, hash mismatches.
    #[error("dataset error: {0}")]
    Dataset(String),

    /// Analytics failures: not enough complete rows, singular systems.
    #[error("analytics error: {0}")]
    Analytics(String),

    /// Job runtime failures: unknown job id, dispatch on a validation error,
    /// queue inconsistencies.
    #[error("runtime error: {0}")]
    Runtime(String),

    /// Underlying filesystem error with path context.
    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// JSON (de)serialization failure with context.
    #[error("serialization error: {context}: {source}")]
    Serde {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl CoreError {
    /// Wrap an I/O error with the path it occurred on.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CoreError::Io {
            path: path.into(),
            source,
        }
    }

    /// Wrap a serde_json error with human context.
    pub fn serde(context: impl Into<String>, source: serde_json::Error) -> Self {
        CoreError::Serde {
            context: context.into(),
            source,
        }
    }
}

/// Convenience alias used throughout the engine.
pub type Result<T> = std::result::Result<T, CoreError>;
