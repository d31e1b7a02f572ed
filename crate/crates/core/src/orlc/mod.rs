//! Optimistic RL with certificates for tabular MDPs.

mod bonus;
mod confidence;
mod planner;
mod runner;
mod stats;

pub use bonus::{
    bonus_refined_lower, bonus_refined_upper, bonus_simple, refined_lower_terms, refined_upper_terms, sigma_hat,
    RowSummary, WidthInputs,
};
pub use confidence::{delta_prime, llnp, phi, ConfidenceVariant, Phi};
pub use planner::{plan_optimistic, BonusKind, ConfidenceConfig};
pub use runner::{run_orlc, OrlcCheckpoint, OrlcRunner, CHECKPOINT_SCHEMA_VERSION};
pub use stats::VisitStats;
