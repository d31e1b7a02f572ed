//! Seeded random instances in the style of the benchmark problems: sparse
//! rewards with Dirichlet dynamics, contextual MDPs with a context shift, and
//! random bandits.

use rand::Rng;

use super::{ContextSampler, ContextualLinearMdp, RewardNoise, ShiftPhase, TabularMdp};
use crate::rng::{sample_dirichlet, stream_rng, Stream};

/// Probability that a tabular mean reward is exactly zero.
pub const TABULAR_REWARD_SPARSITY: f64 = 0.85;
pub const TABULAR_TRANSITION_ALPHA: f64 = 0.1;
/// Probability that a contextual reward coordinate is nonzero.
pub const CONTEXTUAL_THETA_DENSITY: f64 = 0.5;
pub const CONTEXTUAL_TRANSITION_ALPHA: f64 = 0.3;
pub const BANDIT_THETA_DENSITY: f64 = 0.9;

const RARE_ALPHA: f64 = 0.01;
const COMMON_ALPHA: f64 = 0.7;
/// Number of leading context coordinates that are rare before the shift.
const RARE_BEFORE_SHIFT: usize = 4;
/// Bandit contexts: coordinates past this one (1-based) are rare.
const BANDIT_COMMON_COORDS: usize = 7;

fn renormalize(row: &mut [f64]) {
    let total: f64 = row.iter().sum();
    row.iter_mut().for_each(|p| *p /= total);
}

fn dirichlet_row<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> Vec<f64> {
    let mut row = sample_dirichlet(&vec![alpha; n], rng);
    renormalize(&mut row);
    row
}

fn sparse_uniform<R: Rng + ?Sized>(density: f64, rng: &mut R) -> f64 {
    let keep = rng.random::<f64>() < density;
    let y: f64 = rng.random();
    if keep {
        y
    } else {
        0.0
    }
}

/// Random tabular MDP: each mean reward is 0 with probability 0.85 and
/// `Unif[0,1]` otherwise; each transition row is `Dirichlet(0.1)`.
pub fn gen_random_tabular(states: usize, actions: usize, horizon: usize, seed: u64) -> TabularMdp {
    assert!(states > 0 && actions > 0 && horizon > 0, "dimensions must be positive");
    let mut rng = stream_rng(seed, Stream::Instance);
    let mut rewards = vec![vec![0.0; actions]; states];
    let mut transitions = vec![vec![Vec::new(); actions]; states];
    for s in 0..states {
        for a in 0..actions {
            rewards[s][a] = sparse_uniform(1.0 - TABULAR_REWARD_SPARSITY, &mut rng);
            transitions[s][a] = dirichlet_row(states, TABULAR_TRANSITION_ALPHA, &mut rng);
        }
    }
    TabularMdp {
        states,
        actions,
        horizon,
        transitions,
        rewards,
        reward_noise: RewardNoise::Bernoulli,
        initial_state: 0,
        initial_distribution: None,
    }
}

/// Context schedule with the first four coordinates rare (`alpha = 0.01`)
/// until `shift_episode`, and every coordinate at `alpha = 0.7` from then on.
pub fn distribution_shift_phases(dim: usize, shift_episode: u64) -> Vec<ShiftPhase> {
    let before = (0..dim)
        .map(|i| if i < RARE_BEFORE_SHIFT { RARE_ALPHA } else { COMMON_ALPHA })
        .collect();
    vec![
        ShiftPhase { start_episode: 1, alpha: before },
        ShiftPhase { start_episode: shift_episode, alpha: vec![COMMON_ALPHA; dim] },
    ]
}

/// Contextual MDP with `theta_r[s][a][i] = Bernoulli(0.5) * Unif(0,1)`,
/// `Dirichlet(0.3)` dynamics and a constant scalar transition context.
pub fn gen_random_contextual(
    states: usize,
    actions: usize,
    horizon: usize,
    dim_r: usize,
    phases: Vec<ShiftPhase>,
    seed: u64,
) -> ContextualLinearMdp {
    assert!(states > 0 && actions > 0 && horizon > 0 && dim_r > 0, "dimensions must be positive");
    assert!(
        !phases.is_empty() && phases.iter().all(|p| p.alpha.len() == dim_r),
        "every phase needs a concentration of length dim_r"
    );
    let mut rng = stream_rng(seed, Stream::Instance);
    let mut theta_r = vec![vec![Vec::new(); actions]; states];
    let mut theta_p = vec![vec![Vec::new(); actions]; states];
    for s in 0..states {
        for a in 0..actions {
            theta_r[s][a] = (0..dim_r).map(|_| sparse_uniform(CONTEXTUAL_THETA_DENSITY, &mut rng)).collect();
            let row = dirichlet_row(states, CONTEXTUAL_TRANSITION_ALPHA, &mut rng);
            theta_p[s][a] = row.into_iter().map(|p| vec![p]).collect();
        }
    }
    ContextualLinearMdp {
        states,
        actions,
        horizon,
        dim_r,
        dim_p: 1,
        theta_r,
        theta_p,
        context_r: ContextSampler::Dirichlet { phases },
        context_p: ContextSampler::Constant { value: vec![1.0] },
        xi_theta_r: (dim_r as f64).sqrt(),
        xi_theta_p: 1.0,
        xi_x_r: 1.0,
        xi_x_p: 1.0,
        reward_noise: RewardNoise::Bernoulli,
        initial_state: 0,
    }
}

/// Bandit context concentration: 0.7 for the first seven coordinates, 0.01
/// for the rest.
pub fn bandit_context_alpha(dim_r: usize) -> Vec<f64> {
    (0..dim_r)
        .map(|i| if i < BANDIT_COMMON_COORDS { COMMON_ALPHA } else { RARE_ALPHA })
        .collect()
}

/// Random (contextual) bandit, `S = H = 1`, with
/// `theta_r[0][a][i] = Bernoulli(0.9) * Unif(0,1)`. With `dim_r == 1` the
/// context is the constant 1, i.e. a plain multi-armed bandit.
pub fn gen_bandit(actions: usize, dim_r: usize, seed: u64) -> ContextualLinearMdp {
    assert!(actions > 0 && dim_r > 0, "dimensions must be positive");
    let mut rng = stream_rng(seed, Stream::Instance);
    let theta_r = vec![(0..actions)
        .map(|_| (0..dim_r).map(|_| sparse_uniform(BANDIT_THETA_DENSITY, &mut rng)).collect())
        .collect()];
    let theta_p = vec![vec![vec![vec![1.0]]; actions]];
    let context_r = if dim_r == 1 {
        ContextSampler::Constant { value: vec![1.0] }
    } else {
        ContextSampler::Dirichlet {
            phases: vec![ShiftPhase { start_episode: 1, alpha: bandit_context_alpha(dim_r) }],
        }
    };
    ContextualLinearMdp {
        states: 1,
        actions,
        horizon: 1,
        dim_r,
        dim_p: 1,
        theta_r,
        theta_p,
        context_r,
        context_p: ContextSampler::Constant { value: vec![1.0] },
        xi_theta_r: (dim_r as f64).sqrt(),
        xi_theta_p: 1.0,
        xi_x_r: 1.0,
        xi_x_p: 1.0,
        reward_noise: RewardNoise::Bernoulli,
        initial_state: 0,
    }
}
