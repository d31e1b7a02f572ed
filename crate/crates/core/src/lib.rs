//! Optimistic episodic reinforcement learning with policy certificates.
//!
//! Before every episode the learners in this crate announce a policy together
//! with an interval that should contain the policy's expected return and an
//! upper bound on how far that return is from optimal. Two learners are
//! provided:
//!
//! - [`orlc`]: tabular MDPs, empirical model with Bernstein-style widths;
//! - [`si`]: MDPs whose rewards and dynamics are linear in observed contexts,
//!   ridge-regression model with ellipsoid widths.
//!
//! [`harness`] audits the announcements against exact planning on the true
//! per-episode MDP and [`experiment`] drives configured runs from the CLI.

pub mod bounds;
pub mod error;
pub mod experiment;
pub mod harness;
pub mod mdp;
pub mod orlc;
pub mod rng;
pub mod si;

pub use bounds::{Certificate, EpisodeOutput, ValueBounds};
pub use error::{Error, Result};
