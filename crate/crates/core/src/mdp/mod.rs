//! Finite episodic MDPs: representation, validation, simulation and exact
//! planning.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{sample_categorical, SimRng};

mod contextual;
mod generate;
mod io;
pub(crate) mod planning;

pub use contextual::{ContextSampler, ContextualLinearMdp, ShiftPhase};
pub use generate::{
    bandit_context_alpha, distribution_shift_phases, gen_bandit, gen_random_contextual, gen_random_tabular, BANDIT_THETA_DENSITY,
    CONTEXTUAL_THETA_DENSITY, CONTEXTUAL_TRANSITION_ALPHA, TABULAR_REWARD_SPARSITY,
    TABULAR_TRANSITION_ALPHA,
};
pub use io::{GeneratorMeta, Instance, InstanceDocument, INSTANCE_SCHEMA_VERSION};
pub use planning::{policy_return, policy_values, solve_exact, PlanningResult};
pub(crate) use planning::{argmax_lowest, expect};

/// Row sums must match 1 within this tolerance.
pub const PROB_TOL: f64 = 1e-9;

/// Distribution family used to draw rewards around their mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RewardNoise {
    /// `r ~ Bernoulli(mean)`.
    #[default]
    Bernoulli,
    /// `r = mean`.
    Deterministic,
}

impl RewardNoise {
    pub fn sample<R: Rng + ?Sized>(self, mean: f64, rng: &mut R) -> f64 {
        match self {
            RewardNoise::Bernoulli => {
                if rng.random::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
            RewardNoise::Deterministic => mean,
        }
    }
}

/// Finite-horizon MDP with stationary dynamics.
///
/// `transitions[s][a][s']` is `P(s'|s,a)` and `rewards[s][a]` the mean reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabularMdp {
    pub states: usize,
    pub actions: usize,
    pub horizon: usize,
    pub transitions: Vec<Vec<Vec<f64>>>,
    pub rewards: Vec<Vec<f64>>,
    #[serde(default)]
    pub reward_noise: RewardNoise,
    pub initial_state: usize,
    /// Optional start distribution; when absent episodes start in
    /// `initial_state`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_distribution: Option<Vec<f64>>,
}

/// One broken invariant found by [`TabularMdp::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ZeroDimension(&'static str),
    Shape { what: &'static str, expected: usize, got: usize },
    RowSum { state: usize, action: usize, sum: f64 },
    NegativeProbability { state: usize, action: usize, next: usize, value: f64 },
    RewardRange { state: usize, action: usize, value: f64 },
    InitialState { state: usize, states: usize },
    InitialDistribution(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDimension(what) => write!(f, "{what} must be positive"),
            Violation::Shape { what, expected, got } => {
                write!(f, "{what} has length {got}, expected {expected}")
            }
            Violation::RowSum { state, action, sum } => {
                write!(f, "P(.|s={state},a={action}) sums to {sum}")
            }
            Violation::NegativeProbability { state, action, next, value } => {
                write!(f, "P({next}|s={state},a={action}) = {value} is negative")
            }
            Violation::RewardRange { state, action, value } => {
                write!(f, "R(s={state},a={action}) = {value} outside [0,1]")
            }
            Violation::InitialState { state, states } => {
                write!(f, "initial state {state} not in [0,{states})")
            }
            Violation::InitialDistribution(msg) => write!(f, "initial distribution: {msg}"),
        }
    }
}

fn check_simplex(row: &[f64]) -> Option<f64> {
    let sum: f64 = row.iter().sum();
    ((sum - 1.0).abs() > PROB_TOL || !sum.is_finite()).then_some(sum)
}

impl TabularMdp {
    /// Every broken invariant; empty when the MDP is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (what, v) in [("states", self.states), ("actions", self.actions), ("horizon", self.horizon)] {
            if v == 0 {
                out.push(Violation::ZeroDimension(what));
            }
        }
        if self.transitions.len() != self.states {
            out.push(Violation::Shape { what: "transitions", expected: self.states, got: self.transitions.len() });
        }
        if self.rewards.len() != self.states {
            out.push(Violation::Shape { what: "rewards", expected: self.states, got: self.rewards.len() });
        }
        for (s, per_action) in self.transitions.iter().enumerate() {
            if per_action.len() != self.actions {
                out.push(Violation::Shape { what: "transitions[s]", expected: self.actions, got: per_action.len() });
                continue;
            }
            for (a, row) in per_action.iter().enumerate() {
                if row.len() != self.states {
                    out.push(Violation::Shape { what: "transitions[s][a]", expected: self.states, got: row.len() });
                    continue;
                }
                for (next, &p) in row.iter().enumerate() {
                    if p < 0.0 {
                        out.push(Violation::NegativeProbability { state: s, action: a, next, value: p });
                    }
                }
                if let Some(sum) = check_simplex(row) {
                    out.push(Violation::RowSum { state: s, action: a, sum });
                }
            }
        }
        for (s, per_action) in self.rewards.iter().enumerate() {
            if per_action.len() != self.actions {
                out.push(Violation::Shape { what: "rewards[s]", expected: self.actions, got: per_action.len() });
                continue;
            }
            for (a, &r) in per_action.iter().enumerate() {
                if !(0.0..=1.0).contains(&r) {
                    out.push(Violation::RewardRange { state: s, action: a, value: r });
                }
            }
        }
        if self.initial_state >= self.states {
            out.push(Violation::InitialState { state: self.initial_state, states: self.states });
        }
        if let Some(dist) = &self.initial_distribution {
            if dist.len() != self.states {
                out.push(Violation::InitialDistribution(format!("length {} != {}", dist.len(), self.states)));
            } else if dist.iter().any(|p| *p < 0.0) {
                out.push(Violation::InitialDistribution("negative entry".into()));
            } else if let Some(sum) = check_simplex(dist) {
                out.push(Violation::InitialDistribution(format!("sums to {sum}")));
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidMdp(v))
        }
    }

    /// `V^max_h = H - h + 1` for the 1-based step `h`; here `step` is 0-based,
    /// so `step = H` yields 0.
    pub fn vmax(&self, step: usize) -> f64 {
        (self.horizon - step) as f64
    }

    #[inline]
    pub fn p(&self, s: usize, a: usize) -> &[f64] {
        &self.transitions[s][a]
    }

    fn draw_start<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.initial_distribution {
            Some(dist) => sample_categorical(dist, rng),
            None => self.initial_state,
        }
    }

    /// Roll out one episode of `policy`. Successor states come from
    /// `rng.transitions` and rewards from `rng.rewards`.
    pub fn sample_episode(&self, policy: &Policy, episode: u64, rng: &mut SimRng) -> EpisodeTrace {
        let start = self.draw_start(&mut rng.transitions);
        self.sample_episode_from(policy, episode, start, rng)
    }

    /// As [`sample_episode`](Self::sample_episode) with an already drawn
    /// start state.
    pub fn sample_episode_from(&self, policy: &Policy, episode: u64, start: usize, rng: &mut SimRng) -> EpisodeTrace {
        let mut steps = Vec::with_capacity(self.horizon);
        let mut s = start;
        for h in 0..self.horizon {
            let a = policy.action(h, s);
            let reward = self.reward_noise.sample(self.rewards[s][a], &mut rng.rewards);
            let next = sample_categorical(self.p(s, a), &mut rng.transitions);
            steps.push(Step { state: s, action: a, reward, next_state: next });
            s = next;
        }
        EpisodeTrace { episode, context_r: None, context_p: None, steps }
    }

    /// Start state for an episode; draws from the transition stream only when
    /// an initial distribution is configured.
    pub fn start_state(&self, rng: &mut SimRng) -> usize {
        self.draw_start(&mut rng.transitions)
    }
}

/// Deterministic time-dependent policy, `actions[h * S + s]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    pub horizon: usize,
    pub states: usize,
    pub actions: Vec<usize>,
}

impl Policy {
    pub fn new(horizon: usize, states: usize, actions: Vec<usize>) -> Result<Self> {
        let expected = horizon * states;
        if actions.len() != expected {
            return Err(Error::IncompletePolicy { expected, got: actions.len() });
        }
        Ok(Self { horizon, states, actions })
    }

    pub fn constant(horizon: usize, states: usize, action: usize) -> Self {
        Self { horizon, states, actions: vec![action; horizon * states] }
    }

    #[inline]
    pub fn action(&self, h: usize, s: usize) -> usize {
        self.actions[h * self.states + s]
    }

    pub fn set(&mut self, h: usize, s: usize, a: usize) {
        self.actions[h * self.states + s] = a;
    }

    /// Checks the table covers every `(h, s)` of `mdp` with valid actions.
    pub fn check_against(&self, mdp: &TabularMdp) -> Result<()> {
        let expected = mdp.horizon * mdp.states;
        if self.horizon != mdp.horizon || self.states != mdp.states || self.actions.len() != expected {
            return Err(Error::IncompletePolicy { expected, got: self.actions.len() });
        }
        for h in 0..self.horizon {
            for s in 0..self.states {
                let a = self.action(h, s);
                if a >= mdp.actions {
                    return Err(Error::PolicyActionOutOfRange { h, s, action: a, actions: mdp.actions });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
}

/// One episode's observations, plus the contexts it was played under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub episode: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context_r: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context_p: Option<Vec<f64>>,
    pub steps: Vec<Step>,
}

impl EpisodeTrace {
    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }

    pub fn start_state(&self) -> usize {
        self.steps[0].state
    }
}
