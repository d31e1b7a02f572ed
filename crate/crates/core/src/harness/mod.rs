//! Auditing announced certificates against the exact optimum of the MDP that
//! was actually played, and the run-level metrics built from the audits.

mod aggregate;

pub use aggregate::{
    aggregate, pac_extraction, pac_extraction_monotone, pearson, Aggregator, Correlation, IpocMetrics,
    MistakeCount, PacTime,
};

use serde::{Deserialize, Serialize};

use crate::bounds::{Certificate, EpisodeOutput};
use crate::error::Result;
use crate::mdp::{policy_values, solve_exact, Policy, TabularMdp};

/// Numerical slack allowed before a certificate counts as violated.
pub const VALIDITY_SLACK: f64 = 1e-9;

/// Audit of one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunRecord {
    pub k: u64,
    pub epsilon: f64,
    pub interval_lo: f64,
    pub interval_hi: f64,
    /// Optimal return minus the return of the played policy.
    pub gap: f64,
    pub policy_return: f64,
    pub optimal_return: f64,
    pub realized_reward: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context_tag: Option<String>,
    /// `gap > epsilon`.
    pub gap_violation: bool,
    /// `policy_return` outside `[interval_lo, interval_hi]`.
    pub interval_violation: bool,
}

impl RunRecord {
    pub fn is_violation(&self) -> bool {
        self.gap_violation || self.interval_violation
    }
}

/// Everything about an episode that the audit needs.
#[derive(Debug, Clone, Copy)]
pub struct EpisodeClaim<'a> {
    pub k: u64,
    pub start: usize,
    pub policy: &'a Policy,
    pub certificate: Certificate,
    pub realized_reward: f64,
}

impl<'a> From<&'a EpisodeOutput> for EpisodeClaim<'a> {
    fn from(out: &'a EpisodeOutput) -> Self {
        EpisodeClaim {
            k: out.episode,
            start: out.trace.start_state(),
            policy: &out.policy,
            certificate: out.certificate,
            realized_reward: out.trace.total_reward(),
        }
    }
}

/// Audit one episode in the MDP it was played in. Returns are taken from the
/// episode's start state.
pub fn audit_episode(env: &TabularMdp, claim: EpisodeClaim<'_>) -> Result<RunRecord> {
    let optimal = solve_exact(env)?.optimal_return(claim.start);
    audit_with_optimum(env, optimal, claim)
}

/// [`audit_episode`] with the optimal return already known, for fixed
/// environments where it can be computed once.
pub fn audit_with_optimum(env: &TabularMdp, optimal_return: f64, claim: EpisodeClaim<'_>) -> Result<RunRecord> {
    let policy_return = policy_values(env, claim.policy)?[0][claim.start];
    let c = claim.certificate;
    let gap = optimal_return - policy_return;
    Ok(RunRecord {
        k: claim.k,
        epsilon: c.epsilon,
        interval_lo: c.lo,
        interval_hi: c.hi,
        gap,
        policy_return,
        optimal_return,
        realized_reward: claim.realized_reward,
        context_tag: None,
        gap_violation: gap > c.epsilon + VALIDITY_SLACK,
        interval_violation: policy_return < c.lo - VALIDITY_SLACK || policy_return > c.hi + VALIDITY_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::planning::tests::best_by_enumeration;
    use crate::mdp::{gen_random_tabular, policy_return};
    use crate::orlc::{run_orlc, ConfidenceConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn claim(policy: &Policy, lo: f64, hi: f64) -> EpisodeClaim<'_> {
        EpisodeClaim { k: 1, start: 0, policy, certificate: Certificate::new(lo, hi), realized_reward: 0.0 }
    }

    #[test]
    fn optimal_policy_has_zero_gap() {
        let env = gen_random_tabular(4, 3, 3, 1);
        let pi = solve_exact(&env).unwrap().pi_star;
        let rec = audit_episode(&env, claim(&pi, 0.0, 0.0)).unwrap();
        assert_eq!(rec.gap, 0.0);
        assert!(!rec.gap_violation);
    }

    #[test]
    fn vacuous_interval_is_always_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..20 {
            let env = gen_random_tabular(3, 3, 3, seed);
            let pi = Policy::new(3, 3, (0..9).map(|_| rng.random_range(0..3)).collect()).unwrap();
            let rec = audit_episode(&env, claim(&pi, 0.0, 3.0)).unwrap();
            assert!(!rec.is_violation());
        }
    }

    #[test]
    fn gap_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for seed in 0..30 {
            let env = gen_random_tabular(3, 2, 3, seed);
            let pi = Policy::new(3, 3, (0..9).map(|_| rng.random_range(0..2)).collect()).unwrap();
            let rec = audit_episode(&env, claim(&pi, 0.0, 3.0)).unwrap();
            let want = best_by_enumeration(&env) - policy_return(&env, &pi).unwrap();
            assert!((rec.gap - want).abs() < 1e-12);
            assert!(rec.gap >= -1e-12);
        }
    }

    #[test]
    fn tight_wrong_interval_is_flagged() {
        let env = gen_random_tabular(3, 2, 3, 5);
        let pi = Policy::constant(3, 3, 0);
        let ret = policy_return(&env, &pi).unwrap();
        let rec = audit_episode(&env, claim(&pi, ret + 0.1, ret + 0.1)).unwrap();
        assert!(rec.interval_violation);
        let rec = audit_episode(&env, claim(&pi, ret - 1e-10, ret + 1e-10)).unwrap();
        assert!(!rec.interval_violation);
    }

    #[test]
    fn auditing_does_not_disturb_the_learner() {
        let env = gen_random_tabular(4, 2, 3, 8);
        let plain: Vec<_> = run_orlc(env.clone(), 200, ConfidenceConfig::default(), 8).unwrap().collect();
        let audited: Vec<_> = run_orlc(env.clone(), 200, ConfidenceConfig::default(), 8)
            .unwrap()
            .inspect(|out| {
                audit_episode(&env, out.into()).unwrap();
            })
            .collect();
        assert_eq!(plain, audited);
    }
}
