//! Optimistic/pessimistic value tables and the certificates read off them.

use serde::{Deserialize, Serialize};

use crate::mdp::Policy;

/// Upper (`q_upper`, `v_upper`) and lower (`q_lower`, `v_lower`) value
/// bounds with the greedy policy. Steps are 0-based; `v_*[H]` is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueBounds {
    pub horizon: usize,
    pub states: usize,
    pub actions: usize,
    /// `q_upper[(h * S + s) * A + a]`.
    pub q_upper: Vec<f64>,
    pub q_lower: Vec<f64>,
    /// `v_upper[h][s]`, `h` in `0..=H`.
    pub v_upper: Vec<Vec<f64>>,
    pub v_lower: Vec<Vec<f64>>,
    pub policy: Policy,
}

impl ValueBounds {
    pub(crate) fn new(horizon: usize, states: usize, actions: usize) -> Self {
        let cells = horizon * states * actions;
        Self {
            horizon,
            states,
            actions,
            q_upper: vec![0.0; cells],
            q_lower: vec![0.0; cells],
            v_upper: vec![vec![0.0; states]; horizon + 1],
            v_lower: vec![vec![0.0; states]; horizon + 1],
            policy: Policy::constant(horizon, states, 0),
        }
    }

    #[inline]
    pub fn idx(&self, h: usize, s: usize, a: usize) -> usize {
        (h * self.states + s) * self.actions + a
    }

    pub fn q_upper_at(&self, h: usize, s: usize, a: usize) -> f64 {
        self.q_upper[self.idx(h, s, a)]
    }

    pub fn q_lower_at(&self, h: usize, s: usize, a: usize) -> f64 {
        self.q_lower[self.idx(h, s, a)]
    }

    /// Greedy action at `(h, s)` from the already filled upper Q row, then the
    /// matching V entries.
    pub(crate) fn finish_state(&mut self, h: usize, s: usize) {
        let base = self.idx(h, s, 0);
        let row = &self.q_upper[base..base + self.actions];
        let best = crate::mdp::argmax_lowest(row);
        self.policy.set(h, s, best);
        self.v_upper[h][s] = self.q_upper[base + best];
        self.v_lower[h][s] = self.q_lower[base + best];
    }

    pub fn certificate(&self, start: usize) -> Certificate {
        Certificate::new(self.v_lower[0][start], self.v_upper[0][start])
    }

    /// Ordering and clipping invariants, as a list of failures.
    pub fn invariant_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for h in 0..self.horizon {
            let vmax = (self.horizon - h) as f64;
            for s in 0..self.states {
                for a in 0..self.actions {
                    let (lo, hi) = (self.q_lower_at(h, s, a), self.q_upper_at(h, s, a));
                    if !(0.0 <= lo && lo <= hi && hi <= vmax) {
                        out.push(format!("h={h} s={s} a={a}: 0 <= {lo} <= {hi} <= {vmax} fails"));
                    }
                }
                let a = self.policy.action(h, s);
                if self.v_upper[h][s] != self.q_upper_at(h, s, a) || self.v_lower[h][s] != self.q_lower_at(h, s, a) {
                    out.push(format!("h={h} s={s}: V does not match Q at the policy action"));
                }
                let base = self.idx(h, s, 0);
                if crate::mdp::argmax_lowest(&self.q_upper[base..base + self.actions]) != a {
                    out.push(format!("h={h} s={s}: policy is not greedy w.r.t. the upper bound"));
                }
            }
        }
        if self.v_upper[self.horizon].iter().chain(&self.v_lower[self.horizon]).any(|v| *v != 0.0) {
            out.push("terminal values are not zero".into());
        }
        out
    }
}

/// Return interval `[lo, hi]` and optimality certificate `epsilon = hi - lo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub epsilon: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Certificate {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { epsilon: hi - lo, lo, hi }
    }
}

/// What a learner emits for one episode: the certificate and policy announced
/// before the episode and the trace observed while playing it.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutput {
    /// 1-based episode index.
    pub episode: u64,
    pub certificate: Certificate,
    pub policy: crate::mdp::Policy,
    pub trace: crate::mdp::EpisodeTrace,
}
