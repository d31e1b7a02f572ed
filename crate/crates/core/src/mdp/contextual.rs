use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{RewardNoise, TabularMdp, PROB_TOL};
use crate::error::{Error, Result};
use crate::rng::sample_dirichlet;

/// Dirichlet concentration in force from `start_episode` (1-based) onward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftPhase {
    pub start_episode: u64,
    pub alpha: Vec<f64>,
}

/// How the context of each episode is drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ContextSampler {
    Constant { value: Vec<f64> },
    /// Dirichlet contexts whose concentration switches at scheduled episodes.
    Dirichlet { phases: Vec<ShiftPhase> },
}

impl ContextSampler {
    pub fn dim(&self) -> usize {
        match self {
            ContextSampler::Constant { value } => value.len(),
            ContextSampler::Dirichlet { phases } => phases.first().map_or(0, |p| p.alpha.len()),
        }
    }

    /// Concentration used in episode `k`, if this is a Dirichlet sampler.
    pub fn alpha_at(&self, k: u64) -> Option<&[f64]> {
        match self {
            ContextSampler::Constant { .. } => None,
            ContextSampler::Dirichlet { phases } => phases
                .iter()
                .rev()
                .find(|p| p.start_episode <= k)
                .or(phases.first())
                .map(|p| p.alpha.as_slice()),
        }
    }

    /// Index of the phase active in episode `k` (0 for constant samplers).
    pub fn phase_at(&self, k: u64) -> usize {
        match self {
            ContextSampler::Constant { .. } => 0,
            ContextSampler::Dirichlet { phases } => {
                phases.iter().rposition(|p| p.start_episode <= k).unwrap_or(0)
            }
        }
    }

    /// Constant samplers consume no randomness.
    pub fn sample<R: Rng + ?Sized>(&self, k: u64, rng: &mut R) -> Vec<f64> {
        match self {
            ContextSampler::Constant { value } => value.clone(),
            ContextSampler::Dirichlet { .. } => sample_dirichlet(self.alpha_at(k).expect("dirichlet"), rng),
        }
    }
}

/// Finite MDP whose rewards and dynamics are linear in per-episode contexts:
/// `r(s,a) = x_r . theta_r[s][a]`, `P(s'|s,a) = x_p . theta_p[s][a][s']`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextualLinearMdp {
    pub states: usize,
    pub actions: usize,
    pub horizon: usize,
    pub dim_r: usize,
    pub dim_p: usize,
    pub theta_r: Vec<Vec<Vec<f64>>>,
    pub theta_p: Vec<Vec<Vec<Vec<f64>>>>,
    pub context_r: ContextSampler,
    pub context_p: ContextSampler,
    pub xi_theta_r: f64,
    pub xi_theta_p: f64,
    pub xi_x_r: f64,
    pub xi_x_p: f64,
    #[serde(default)]
    pub reward_noise: RewardNoise,
    pub initial_state: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl ContextualLinearMdp {
    /// Parameter entries whose norm exceeds the declared bound.
    pub fn parameter_bound_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in 0..self.states {
            for a in 0..self.actions {
                let n = norm(&self.theta_r[s][a]);
                if n > self.xi_theta_r + 1e-12 {
                    out.push(format!("|theta_r[{s}][{a}]| = {n} > {}", self.xi_theta_r));
                }
                for (sn, th) in self.theta_p[s][a].iter().enumerate() {
                    let n = norm(th);
                    if n > self.xi_theta_p + 1e-12 {
                        out.push(format!("|theta_p[{s}][{a}][{sn}]| = {n} > {}", self.xi_theta_p));
                    }
                }
            }
        }
        out
    }

    /// The tabular MDP played under contexts `(x_r, x_p)`.
    ///
    /// Entries within `PROB_TOL` of their valid range are snapped into it;
    /// anything further out is a generator bug and is reported.
    pub fn realize(&self, x_r: &[f64], x_p: &[f64]) -> Result<TabularMdp> {
        if x_r.len() != self.dim_r {
            return Err(Error::DimensionMismatch { what: "reward context", expected: self.dim_r, got: x_r.len() });
        }
        if x_p.len() != self.dim_p {
            return Err(Error::DimensionMismatch { what: "transition context", expected: self.dim_p, got: x_p.len() });
        }
        let snap = |v: f64| -> Option<f64> {
            if (-PROB_TOL..=1.0 + PROB_TOL).contains(&v) {
                Some(v.clamp(0.0, 1.0))
            } else {
                None
            }
        };
        let mut rewards = vec![vec![0.0; self.actions]; self.states];
        let mut transitions = vec![vec![vec![0.0; self.states]; self.actions]; self.states];
        for s in 0..self.states {
            for a in 0..self.actions {
                let r = dot(x_r, &self.theta_r[s][a]);
                rewards[s][a] = snap(r)
                    .ok_or_else(|| Error::InvalidRealization(format!("r({s},{a}) = {r}")))?;
                for (sn, slot) in transitions[s][a].iter_mut().enumerate() {
                    let p = dot(x_p, &self.theta_p[s][a][sn]);
                    *slot = snap(p)
                        .ok_or_else(|| Error::InvalidRealization(format!("P({sn}|{s},{a}) = {p}")))?;
                }
            }
        }
        let mdp = TabularMdp {
            states: self.states,
            actions: self.actions,
            horizon: self.horizon,
            transitions,
            rewards,
            reward_noise: self.reward_noise,
            initial_state: self.initial_state,
            initial_distribution: None,
        };
        let violations = mdp.validate();
        if violations.is_empty() {
            Ok(mdp)
        } else {
            Err(Error::InvalidRealization(
                violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{gen_random_contextual, ShiftPhase};
    use crate::rng::{stream_rng, Stream};

    fn schedule(d: usize) -> Vec<ShiftPhase> {
        vec![ShiftPhase { start_episode: 1, alpha: vec![0.7; d] }]
    }

    #[test]
    fn identity_transition_context_reproduces_theta() {
        let c = gen_random_contextual(3, 2, 2, 4, schedule(4), 8);
        let m = c.realize(&[0.25; 4], &[1.0]).unwrap();
        for s in 0..3 {
            for a in 0..2 {
                for sn in 0..3 {
                    assert_eq!(m.transitions[s][a][sn], c.theta_p[s][a][sn][0]);
                }
            }
        }
    }

    #[test]
    fn basis_reward_context_picks_coordinate() {
        let c = gen_random_contextual(3, 2, 2, 4, schedule(4), 2);
        let m = c.realize(&[0.0, 0.0, 1.0, 0.0], &[1.0]).unwrap();
        for s in 0..3 {
            for a in 0..2 {
                assert_eq!(m.rewards[s][a], c.theta_r[s][a][2]);
            }
        }
    }

    #[test]
    fn sampled_contexts_realize_valid_rewards() {
        let c = gen_random_contextual(3, 3, 2, 5, schedule(5), 13);
        let mut rng = stream_rng(13, Stream::Context);
        for k in 1..=10_000 {
            let x = c.context_r.sample(k, &mut rng);
            let m = c.realize(&x, &[1.0]).unwrap();
            assert!(m.rewards.iter().flatten().all(|r| (0.0..=1.0).contains(r)));
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let c = gen_random_contextual(2, 2, 2, 3, schedule(3), 1);
        assert!(matches!(c.realize(&[1.0], &[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(c.realize(&[1.0, 0.0, 0.0], &[1.0, 0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn bad_generator_output_is_caught() {
        let mut c = gen_random_contextual(2, 2, 2, 2, schedule(2), 1);
        c.theta_r[0][0] = vec![3.0, 3.0];
        assert!(matches!(c.realize(&[0.5, 0.5], &[1.0]), Err(Error::InvalidRealization(_))));
    }

    #[test]
    fn schedule_switches_concentration() {
        let sampler = ContextSampler::Dirichlet {
            phases: vec![
                ShiftPhase { start_episode: 1, alpha: vec![0.01, 0.7] },
                ShiftPhase { start_episode: 100, alpha: vec![0.7, 0.7] },
            ],
        };
        assert_eq!(sampler.alpha_at(99).unwrap(), &[0.01, 0.7]);
        assert_eq!(sampler.alpha_at(100).unwrap(), &[0.7, 0.7]);
        assert_eq!(sampler.phase_at(1), 0);
        assert_eq!(sampler.phase_at(150), 1);
    }
}
