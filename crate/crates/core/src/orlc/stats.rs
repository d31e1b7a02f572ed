use serde::{Deserialize, Serialize};

use crate::mdp::EpisodeTrace;

/// Visit counts and running empirical model per `(s, a)`.
///
/// Unvisited pairs hold `r_hat = 0` and a uniform placeholder row; the
/// planner never lets those placeholders reach the bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisitStats {
    pub states: usize,
    pub actions: usize,
    pub horizon: usize,
    pub n: Vec<u64>,
    pub r_hat: Vec<f64>,
    /// `p_hat[(s * A + a) * S + s']`.
    pub p_hat: Vec<f64>,
}

impl VisitStats {
    pub fn new(states: usize, actions: usize, horizon: usize) -> Self {
        Self {
            states,
            actions,
            horizon,
            n: vec![0; states * actions],
            r_hat: vec![0.0; states * actions],
            p_hat: vec![1.0 / states as f64; states * actions * states],
        }
    }

    #[inline]
    fn pair(&self, s: usize, a: usize) -> usize {
        s * self.actions + a
    }

    pub fn count(&self, s: usize, a: usize) -> u64 {
        self.n[self.pair(s, a)]
    }

    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.r_hat[self.pair(s, a)]
    }

    pub fn p_row(&self, s: usize, a: usize) -> &[f64] {
        let base = self.pair(s, a) * self.states;
        &self.p_hat[base..base + self.states]
    }

    /// Running-mean update for one observed transition.
    pub fn observe(&mut self, s: usize, a: usize, reward: f64, next: usize) {
        let i = self.pair(s, a);
        self.n[i] += 1;
        let n = self.n[i];
        let base = i * self.states;
        let row = &mut self.p_hat[base..base + self.states];
        if n == 1 {
            self.r_hat[i] = reward;
            row.iter_mut().for_each(|p| *p = 0.0);
            row[next] = 1.0;
            return;
        }
        let w = 1.0 / n as f64;
        self.r_hat[i] += (reward - self.r_hat[i]) * w;
        for (sn, p) in row.iter_mut().enumerate() {
            let target = if sn == next { 1.0 } else { 0.0 };
            *p += (target - *p) * w;
        }
    }

    pub fn update(&mut self, trace: &EpisodeTrace) {
        for step in &trace.steps {
            self.observe(step.state, step.action, step.reward, step.next_state);
        }
    }
}
