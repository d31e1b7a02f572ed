use serde::{Deserialize, Serialize};

use super::{Policy, TabularMdp};
use crate::error::Result;

/// Optimal values and a greedy optimal policy; `v_star[H]` is all zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanningResult {
    pub v_star: Vec<Vec<f64>>,
    pub q_star: Vec<Vec<Vec<f64>>>,
    pub pi_star: Policy,
}

impl PlanningResult {
    /// `V*_1(s)`.
    pub fn optimal_return(&self, start: usize) -> f64 {
        self.v_star[0][start]
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[inline]
pub(crate) fn expect(p: &[f64], v: &[f64]) -> f64 {
    p.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Backward induction on the true model.
pub fn solve_exact(mdp: &TabularMdp) -> Result<PlanningResult> {
    mdp.ensure_valid()?;
    let (ns, na, nh) = (mdp.states, mdp.actions, mdp.horizon);
    let mut v_star = vec![vec![0.0; ns]; nh + 1];
    let mut q_star = vec![vec![vec![0.0; na]; ns]; nh];
    let mut pi_star = Policy::constant(nh, ns, 0);
    for h in (0..nh).rev() {
        let (head, tail) = v_star.split_at_mut(h + 1);
        let next = &tail[0];
        for s in 0..ns {
            let q = &mut q_star[h][s];
            for (a, qa) in q.iter_mut().enumerate() {
                *qa = mdp.rewards[s][a] + expect(mdp.p(s, a), next);
            }
            let best = argmax_lowest(q);
            pi_star.set(h, s, best);
            head[h][s] = q[best];
        }
    }
    Ok(PlanningResult { v_star, q_star, pi_star })
}

/// `V^pi_h(s)` for every step, `(H+1) x S` with a zero last row.
pub fn policy_values(mdp: &TabularMdp, policy: &Policy) -> Result<Vec<Vec<f64>>> {
    policy.check_against(mdp)?;
    let (ns, nh) = (mdp.states, mdp.horizon);
    let mut v = vec![vec![0.0; ns]; nh + 1];
    for h in (0..nh).rev() {
        for s in 0..ns {
            let a = policy.action(h, s);
            v[h][s] = mdp.rewards[s][a] + expect(mdp.p(s, a), &v[h + 1]);
        }
    }
    Ok(v)
}

/// Expected return of `policy` from the MDP's start state (or averaged over
/// its initial distribution when one is set).
pub fn policy_return(mdp: &TabularMdp, policy: &Policy) -> Result<f64> {
    let v = policy_values(mdp, policy)?;
    Ok(match &mdp.initial_distribution {
        Some(dist) => expect(dist, &v[0]),
        None => v[0][mdp.initial_state],
    })
}
