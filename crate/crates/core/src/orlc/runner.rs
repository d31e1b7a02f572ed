use serde::{Deserialize, Serialize};

use super::planner::{plan_optimistic, ConfidenceConfig};
use super::stats::VisitStats;
use crate::bounds::{EpisodeOutput, ValueBounds};
use crate::error::Result;
use crate::mdp::TabularMdp;
use crate::rng::{SimRng, StreamPositions};

pub const CHECKPOINT_SCHEMA_VERSION: &str = "orlc.checkpoint.tabular.v1";

/// Tabular learner interacting with a fixed environment.
///
/// Each call to [`next_episode`](Self::next_episode) plans on the current
/// statistics, announces the certificate, plays the greedy policy and folds
/// the trace back into the statistics.
#[derive(Debug, Clone)]
pub struct OrlcRunner {
    env: TabularMdp,
    config: ConfidenceConfig,
    stats: VisitStats,
    seed: u64,
    rng: SimRng,
    episode: u64,
}

/// Resumable learner state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrlcCheckpoint {
    pub schema_version: String,
    pub seed: u64,
    pub episodes_done: u64,
    pub streams: StreamPositions,
    pub config: ConfidenceConfig,
    pub stats: VisitStats,
}

impl OrlcRunner {
    pub fn new(env: TabularMdp, config: ConfidenceConfig, seed: u64) -> Result<Self> {
        env.ensure_valid()?;
        config.validate()?;
        let stats = VisitStats::new(env.states, env.actions, env.horizon);
        Ok(Self { env, config, stats, seed, rng: SimRng::from_seed(seed), episode: 0 })
    }

    pub fn env(&self) -> &TabularMdp {
        &self.env
    }

    pub fn stats(&self) -> &VisitStats {
        &self.stats
    }

    pub fn plan(&self) -> ValueBounds {
        plan_optimistic(&self.stats, &self.config)
    }

    pub fn next_episode(&mut self) -> EpisodeOutput {
        self.episode += 1;
        let bounds = self.plan();
        let start = self.env.start_state(&mut self.rng);
        let certificate = bounds.certificate(start);
        let trace = self.env.sample_episode_from(&bounds.policy, self.episode, start, &mut self.rng);
        self.stats.update(&trace);
        EpisodeOutput { episode: self.episode, certificate, policy: bounds.policy, trace }
    }

    pub fn checkpoint(&self) -> OrlcCheckpoint {
        OrlcCheckpoint {
            schema_version: CHECKPOINT_SCHEMA_VERSION.to_string(),
            seed: self.seed,
            episodes_done: self.episode,
            streams: self.rng.positions(),
            config: self.config,
            stats: self.stats.clone(),
        }
    }

    pub fn resume(env: TabularMdp, cp: OrlcCheckpoint) -> Result<Self> {
        let mut r = Self::new(env, cp.config, cp.seed)?;
        r.stats = cp.stats;
        r.episode = cp.episodes_done;
        r.rng = SimRng::restore(cp.seed, cp.streams);
        Ok(r)
    }
}

impl Iterator for OrlcRunner {
    type Item = EpisodeOutput;

    fn next(&mut self) -> Option<EpisodeOutput> {
        Some(self.next_episode())
    }
}

/// The first `episodes` outputs of a fresh learner.
pub fn run_orlc(
    env: TabularMdp,
    episodes: u64,
    config: ConfidenceConfig,
    seed: u64,
) -> Result<impl Iterator<Item = EpisodeOutput>> {
    Ok(OrlcRunner::new(env, config, seed)?.take(episodes as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{gen_random_tabular, RewardNoise};

    fn two_arm() -> TabularMdp {
        TabularMdp {
            states: 1,
            actions: 2,
            horizon: 1,
            transitions: vec![vec![vec![1.0], vec![1.0]]],
            rewards: vec![vec![0.9, 0.1]],
            reward_noise: RewardNoise::Bernoulli,
            initial_state: 0,
            initial_distribution: None,
        }
    }

    #[test]
    fn first_certificate_is_the_horizon() {
        let mut r = OrlcRunner::new(gen_random_tabular(5, 3, 4, 1), ConfidenceConfig::default(), 1).unwrap();
        let out = r.next_episode();
        assert_eq!(out.episode, 1);
        assert_eq!(out.certificate.epsilon, 4.0);
        assert_eq!((out.certificate.lo, out.certificate.hi), (0.0, 4.0));
    }

    #[test]
    fn certificates_stay_in_range() {
        for out in run_orlc(gen_random_tabular(3, 2, 3, 2), 2000, ConfidenceConfig::default(), 2).unwrap() {
            let c = out.certificate;
            assert!(c.epsilon >= 0.0 && c.lo >= 0.0 && c.hi <= 3.0 && c.lo <= c.hi);
            assert_eq!(c.epsilon, c.hi - c.lo);
        }
    }

    #[test]
    fn two_armed_interval_separates_the_arms() {
        let last = run_orlc(two_arm(), 20_000, ConfidenceConfig::default(), 3).unwrap().last().unwrap();
        let c = last.certificate;
        assert!(c.lo <= 0.9 && 0.9 <= c.hi && c.lo > 0.1, "{c:?}");
        assert!(c.epsilon < 0.4);
        assert_eq!(last.policy.action(0, 0), 0);
    }

    #[test]
    fn same_seed_same_run() {
        let a: Vec<_> = run_orlc(gen_random_tabular(4, 2, 3, 5), 300, ConfidenceConfig::default(), 9).unwrap().collect();
        let b: Vec<_> = run_orlc(gen_random_tabular(4, 2, 3, 5), 300, ConfidenceConfig::default(), 9).unwrap().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn checkpoint_resume_is_seamless() {
        let env = gen_random_tabular(4, 2, 3, 6);
        let full: Vec<_> = run_orlc(env.clone(), 400, ConfidenceConfig::default(), 6).unwrap().collect();
        let mut first = OrlcRunner::new(env.clone(), ConfidenceConfig::default(), 6).unwrap();
        for _ in 0..250 {
            first.next_episode();
        }
        let json = serde_json::to_string(&first.checkpoint()).unwrap();
        let cp: OrlcCheckpoint = serde_json::from_str(&json).unwrap();
        let rest: Vec<_> = OrlcRunner::resume(env, cp).unwrap().take(150).collect();
        assert_eq!(&full[250..], &rest[..]);
    }
}
