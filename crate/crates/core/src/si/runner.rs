use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lsq::LsqStats;
use super::planner::{plan_optimistic_si, EllipsoidConfig, SiPlan};
use crate::bounds::EpisodeOutput;
use crate::error::{Error, Result};
use crate::mdp::{ContextualLinearMdp, TabularMdp};
use crate::rng::{stream_rng, SimRng, Stream, StreamPositions};

pub const SI_CHECKPOINT_SCHEMA_VERSION: &str = "orlc.checkpoint.si.v1";

/// One episode of the contextual learner together with the MDP it was
/// played in, so the announcement can be audited.
#[derive(Debug, Clone, PartialEq)]
pub struct SiEpisode {
    pub output: EpisodeOutput,
    pub realized: TabularMdp,
    /// Index of the context-distribution phase in force.
    pub phase: usize,
    pub box_fallbacks: u64,
}

/// Contextual learner. Per episode: draw `x_r` then `x_p` from the context
/// stream, plan on the ridge model, announce, play in the realized MDP and
/// update the statistics.
#[derive(Debug, Clone)]
pub struct OrlcSiRunner {
    env: ContextualLinearMdp,
    config: EllipsoidConfig,
    stats: LsqStats,
    seed: u64,
    contexts: ChaCha8Rng,
    rng: SimRng,
    episode: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrlcSiCheckpoint {
    pub schema_version: String,
    pub seed: u64,
    pub episodes_done: u64,
    pub streams: StreamPositions,
    pub context_stream: u128,
    pub config: EllipsoidConfig,
    pub stats: LsqStats,
}

impl OrlcSiRunner {
    pub fn new(env: ContextualLinearMdp, config: EllipsoidConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        if env.context_r.dim() != env.dim_r {
            return Err(Error::DimensionMismatch { what: "reward context sampler", expected: env.dim_r, got: env.context_r.dim() });
        }
        if env.context_p.dim() != env.dim_p {
            return Err(Error::DimensionMismatch { what: "transition context sampler", expected: env.dim_p, got: env.context_p.dim() });
        }
        let stats = LsqStats::new(env.states, env.actions, env.dim_r, env.dim_p, config.lambda)?;
        Ok(Self {
            env,
            config,
            stats,
            seed,
            contexts: stream_rng(seed, Stream::Context),
            rng: SimRng::from_seed(seed),
            episode: 0,
        })
    }

    pub fn env(&self) -> &ContextualLinearMdp {
        &self.env
    }

    pub fn stats(&self) -> &LsqStats {
        &self.stats
    }

    pub fn plan(&self, x_r: &[f64], x_p: &[f64]) -> Result<SiPlan> {
        plan_optimistic_si(&self.stats, &self.config, self.env.horizon, x_r, x_p)
    }

    pub fn next_episode(&mut self) -> Result<SiEpisode> {
        let k = self.episode + 1;
        let x_r = self.env.context_r.sample(k, &mut self.contexts);
        let x_p = self.env.context_p.sample(k, &mut self.contexts);
        let realized = self.env.realize(&x_r, &x_p)?;
        let SiPlan { bounds, box_fallbacks } = self.plan(&x_r, &x_p)?;
        let start = realized.start_state(&mut self.rng);
        let certificate = bounds.certificate(start);
        let mut trace = realized.sample_episode_from(&bounds.policy, k, start, &mut self.rng);
        trace.context_r = Some(x_r);
        trace.context_p = Some(x_p);
        self.stats.update(&trace)?;
        self.episode = k;
        Ok(SiEpisode {
            output: EpisodeOutput { episode: k, certificate, policy: bounds.policy, trace },
            realized,
            phase: self.env.context_r.phase_at(k),
            box_fallbacks,
        })
    }

    pub fn checkpoint(&self) -> OrlcSiCheckpoint {
        OrlcSiCheckpoint {
            schema_version: SI_CHECKPOINT_SCHEMA_VERSION.to_string(),
            seed: self.seed,
            episodes_done: self.episode,
            streams: self.rng.positions(),
            context_stream: self.contexts.get_word_pos(),
            config: self.config,
            stats: self.stats.clone(),
        }
    }

    pub fn resume(env: ContextualLinearMdp, cp: OrlcSiCheckpoint) -> Result<Self> {
        let mut r = Self::new(env, cp.config, cp.seed)?;
        if (cp.stats.states, cp.stats.actions, cp.stats.dim_r, cp.stats.dim_p)
            != (r.stats.states, r.stats.actions, r.stats.dim_r, r.stats.dim_p)
        {
            return Err(Error::InvalidParameter { name: "checkpoint", reason: "statistics do not match the instance".into() });
        }
        r.stats = cp.stats;
        r.episode = cp.episodes_done;
        r.rng = SimRng::restore(cp.seed, cp.streams);
        r.contexts.set_word_pos(cp.context_stream);
        Ok(r)
    }
}

impl Iterator for OrlcSiRunner {
    type Item = Result<SiEpisode>;

    fn next(&mut self) -> Option<Result<SiEpisode>> {
        Some(self.next_episode())
    }
}

pub fn run_orlc_si(
    env: ContextualLinearMdp,
    episodes: u64,
    config: EllipsoidConfig,
    seed: u64,
) -> Result<impl Iterator<Item = Result<SiEpisode>>> {
    Ok(OrlcSiRunner::new(env, config, seed)?.take(episodes as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{gen_bandit, gen_random_contextual, solve_exact, ShiftPhase};

    fn phases(d: usize) -> Vec<ShiftPhase> {
        vec![ShiftPhase { start_episode: 1, alpha: vec![0.7; d] }]
    }

    #[test]
    fn first_episode_is_uninformed() {
        let env = gen_random_contextual(4, 3, 3, 4, phases(4), 0);
        let mut r = OrlcSiRunner::new(env, EllipsoidConfig::default(), 0).unwrap();
        let ep = r.next_episode().unwrap();
        assert_eq!(ep.output.certificate.epsilon, 3.0);
        assert_eq!(ep.output.trace.steps.len(), 3);
        assert_eq!(ep.output.trace.context_r.as_ref().unwrap().len(), 4);
    }

    #[test]
    fn intervals_contain_the_policy_return() {
        let env = gen_random_contextual(3, 2, 2, 3, phases(3), 4);
        for ep in run_orlc_si(env, 1500, EllipsoidConfig::default(), 4).unwrap() {
            let ep = ep.unwrap();
            let c = ep.output.certificate;
            let ret = crate::mdp::policy_return(&ep.realized, &ep.output.policy).unwrap();
            let opt = solve_exact(&ep.realized).unwrap().optimal_return(ep.realized.initial_state);
            assert!(c.lo <= ret + 1e-9 && ret <= c.hi + 1e-9, "{c:?} {ret}");
            assert!(opt - ret <= c.epsilon + 1e-9);
        }
    }

    #[test]
    fn bandit_certificates_shrink() {
        let env = gen_bandit(5, 1, 3);
        let eps: Vec<f64> = run_orlc_si(env, 3000, EllipsoidConfig::default(), 3)
            .unwrap()
            .map(|e| e.unwrap().output.certificate.epsilon)
            .collect();
        assert_eq!(eps[0], 1.0);
        assert!(eps[2999] < 0.3, "{}", eps[2999]);
    }

    #[test]
    fn checkpoint_resume_is_seamless() {
        let env = gen_random_contextual(3, 2, 2, 3, phases(3), 7);
        let full: Vec<_> = run_orlc_si(env.clone(), 300, EllipsoidConfig::default(), 7)
            .unwrap()
            .map(|e| e.unwrap())
            .collect();
        let mut first = OrlcSiRunner::new(env.clone(), EllipsoidConfig::default(), 7).unwrap();
        for _ in 0..120 {
            first.next_episode().unwrap();
        }
        let json = serde_json::to_string(&first.checkpoint()).unwrap();
        let cp: OrlcSiCheckpoint = serde_json::from_str(&json).unwrap();
        let rest: Vec<_> = OrlcSiRunner::resume(env, cp).unwrap().take(180).map(|e| e.unwrap()).collect();
        assert_eq!(&full[120..], &rest[..]);
    }
}
