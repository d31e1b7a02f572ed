//! Learner for MDPs whose rewards and transitions are linear in observed
//! per-episode contexts.

mod box_norm;
mod lsq;
mod planner;
mod runner;

pub use box_norm::prob_est_norm;
pub use lsq::{ellipsoid_log_inv_delta, ellipsoid_width, model_point_estimates, Ellipsoid, LsqStats, PairModel};
pub use planner::{plan_optimistic_si, EllipsoidConfig, SiPlan, SiPlanner};
pub use runner::{run_orlc_si, OrlcSiCheckpoint, OrlcSiRunner, SiEpisode, SI_CHECKPOINT_SCHEMA_VERSION};
