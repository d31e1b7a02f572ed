use thiserror::Error;

use crate::mdp::Violation;

/// Errors raised by the library. Report-style checks (e.g. MDP validation)
/// return their findings directly instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid MDP: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidMdp(Vec<Violation>),

    #[error("policy table has {got} entries, expected {expected} (H x S)")]
    IncompletePolicy { expected: usize, got: usize },

    #[error("policy action {action} out of range at (h={h}, s={s}); A={actions}")]
    PolicyActionOutOfRange {
        h: usize,
        s: usize,
        action: usize,
        actions: usize,
    },

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("realized context MDP failed validation: {0}")]
    InvalidRealization(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(&'static str),

    #[error("probability box is infeasible: lower mass {lower_mass}, upper mass {upper_mass}")]
    InfeasibleBox { lower_mass: f64, upper_mass: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
