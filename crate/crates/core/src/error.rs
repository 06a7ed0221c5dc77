//! Error taxonomy shared by the whole workspace.
//!
//! Errors are split by how a caller should react:
//! - [`CoreError::InvalidInput`] / [`CoreError::InvalidGame`]: the input is malformed or violates a
//!   standing assumption; fix the input.
//! - [`CoreError::Budget`]: the instance is legal but exceeds a configured resource budget
//!   (enumeration caps, arena sizes, search deadlines); raise the budget or shrink the instance.
//! - [`CoreError::Falsification`]: an internal runtime check that encodes a proved fact failed.
//!   This is never expected on any input; it indicates a bug and is surfaced loudly rather than
//!   papered over.

use thiserror::Error;

/// A single standing-assumption violation found by validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A vertex has no outgoing edge (every play must be infinite).
    NoOutgoingEdge(String),
    /// All edge weights are zero, so the maximal edge norm is 0.
    ZeroEdgeNorm,
    /// A cycle visits only Player-2 vertices (listed in cycle order).
    Player2OnlyCycle(Vec<String>),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NoOutgoingEdge(v) => write!(f, "vertex {v:?} has no outgoing edge"),
            Violation::ZeroEdgeNorm => write!(f, "all edge weights are zero"),
            Violation::Player2OnlyCycle(vs) => {
                write!(f, "cycle through Player-2 vertices only: {}", vs.join(" -> "))
            }
        }
    }
}

/// Workspace-wide error type.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Structurally malformed input (bad ids, dimension mismatches, unparsable documents).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A well-formed graph that violates the standing assumptions.
    #[error("game violates standing assumptions: {}", format_violations(.0))]
    InvalidGame(Vec<Violation>),

    /// A configured resource budget was exceeded before an answer was reached.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// An internal consistency check that encodes a proved fact failed.
    #[error("internal falsification: {0}")]
    Falsification(String),
}

fn format_violations(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
