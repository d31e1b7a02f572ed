use serde::{Deserialize, Serialize};

use super::box_norm::prob_est_norm;
use super::lsq::{ellipsoid_log_inv_delta, model_point_estimates, LsqStats};
use crate::bounds::ValueBounds;
use crate::error::{Error, Result};
use crate::mdp::expect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SiPlanner {
    /// Expectation under the point estimate plus `|V|_1` times the width.
    Plain,
    /// Worst/best case over distributions inside the per-coordinate box.
    #[default]
    MassConstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidConfig {
    pub delta: f64,
    pub lambda: f64,
    /// Parameter norm bounds; `sqrt(d)` of the matching block when absent.
    #[serde(default)]
    pub xi_theta_r: Option<f64>,
    #[serde(default)]
    pub xi_theta_p: Option<f64>,
    #[serde(default)]
    pub planner: SiPlanner,
}

impl Default for EllipsoidConfig {
    fn default() -> Self {
        Self { delta: 0.1, lambda: 1.0, xi_theta_r: None, xi_theta_p: None, planner: SiPlanner::MassConstrained }
    }
}

impl EllipsoidConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter { name: "delta", reason: format!("{} not in (0,1)", self.delta) });
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter { name: "lambda", reason: format!("{} must be positive", self.lambda) });
        }
        for (name, xi) in [("xi_theta_r", self.xi_theta_r), ("xi_theta_p", self.xi_theta_p)] {
            if let Some(x) = xi {
                if !(x >= 0.0 && x.is_finite()) {
                    return Err(Error::InvalidParameter { name, reason: format!("{x} must be non-negative") });
                }
            }
        }
        Ok(())
    }

    pub fn xi_r(&self, dim_r: usize) -> f64 {
        self.xi_theta_r.unwrap_or((dim_r as f64).sqrt())
    }

    pub fn xi_p(&self, dim_p: usize) -> f64 {
        self.xi_theta_p.unwrap_or((dim_p as f64).sqrt())
    }
}

/// Bounds for one episode plus how many `(h, s, a)` cells fell back to the
/// plain width because their box missed the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SiPlan {
    pub bounds: ValueBounds,
    pub box_fallbacks: u64,
}

/// Backward induction on the ridge-regression model at contexts `(x_r, x_p)`.
pub fn plan_optimistic_si(
    stats: &LsqStats,
    config: &EllipsoidConfig,
    horizon: usize,
    x_r: &[f64],
    x_p: &[f64],
) -> Result<SiPlan> {
    let (ns, na) = (stats.states, stats.actions);
    let log_inv_delta = ellipsoid_log_inv_delta(ns, na, horizon, config.delta);
    let (xi_r, xi_p) = (config.xi_r(stats.dim_r), config.xi_p(stats.dim_p));

    // Estimates and widths do not depend on the step.
    let mut r_hat = Vec::with_capacity(ns * na);
    let mut p_hat = Vec::with_capacity(ns * na);
    let mut w_r = Vec::with_capacity(ns * na);
    let mut w_p = Vec::with_capacity(ns * na);
    for s in 0..ns {
        for a in 0..na {
            let m = model_point_estimates(stats, s, a, x_r, x_p)?;
            w_r.push(m.reward_ellipsoid.width_with_norm(m.norm_r, xi_r, stats.lambda, log_inv_delta));
            w_p.push(m.transition_ellipsoid.width_with_norm(m.norm_p, xi_p, stats.lambda, log_inv_delta));
            r_hat.push(m.r_hat);
            p_hat.push(m.p_hat);
        }
    }

    let mut b = ValueBounds::new(horizon, ns, na);
    let mut box_fallbacks = 0;
    for h in (0..horizon).rev() {
        let vmax = (horizon - h) as f64;
        let hi_next = b.v_upper[h + 1].clone();
        let lo_next = b.v_lower[h + 1].clone();
        let neg_lo_next: Vec<f64> = lo_next.iter().map(|v| -v).collect();
        let hi_l1: f64 = hi_next.iter().map(|v| v.abs()).sum();
        let lo_l1: f64 = lo_next.iter().map(|v| v.abs()).sum();
        for s in 0..ns {
            for a in 0..na {
                let j = s * na + a;
                let i = b.idx(h, s, a);
                let p = &p_hat[j];
                let plain = || {
                    (
                        expect(p, &hi_next) + hi_l1 * w_p[j],
                        expect(p, &lo_next) - lo_l1 * w_p[j],
                    )
                };
                let (up, lo) = match config.planner {
                    SiPlanner::Plain => plain(),
                    SiPlanner::MassConstrained => {
                        match (prob_est_norm(p, w_p[j], &hi_next), prob_est_norm(p, w_p[j], &neg_lo_next)) {
                            (Ok(u), Ok(l)) => (u, -l),
                            _ => {
                                box_fallbacks += 1;
                                plain()
                            }
                        }
                    }
                };
                b.q_upper[i] = (r_hat[j] + up + w_r[j]).max(0.0).min(vmax);
                b.q_lower[i] = (r_hat[j] + lo - w_r[j]).max(0.0).min(vmax);
            }
            b.finish_state(h, s);
        }
    }
    Ok(SiPlan { bounds: b, box_fallbacks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{EpisodeTrace, Step};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_walks(ns: usize, na: usize, nh: usize, episodes: usize, seed: u64) -> Vec<Vec<Step>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..episodes)
            .map(|_| {
                let mut s = 0;
                (0..nh)
                    .map(|_| {
                        let a = rng.random_range(0..na);
                        let n = if rng.random::<f64>() < 0.6 { (s + a) % ns } else { rng.random_range(0..ns) };
                        let st = Step { state: s, action: a, reward: if rng.random::<f64>() < 0.3 { 1.0 } else { 0.0 }, next_state: n };
                        s = n;
                        st
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn no_data_is_trivial() {
        let st = LsqStats::new(3, 2, 4, 1, 1.0).unwrap();
        for planner in [SiPlanner::Plain, SiPlanner::MassConstrained] {
            let cfg = EllipsoidConfig { planner, ..Default::default() };
            let plan = plan_optimistic_si(&st, &cfg, 4, &[0.25; 4], &[1.0]).unwrap();
            assert_eq!(plan.bounds.certificate(0).epsilon, 4.0);
            assert!(plan.bounds.invariant_failures().is_empty());
        }
    }

    #[test]
    fn rejects_wrong_context_dimension() {
        let st = LsqStats::new(3, 2, 4, 1, 1.0).unwrap();
        assert!(plan_optimistic_si(&st, &EllipsoidConfig::default(), 4, &[0.25; 3], &[1.0]).is_err());
    }

    #[test]
    fn mass_constrained_upper_bound_is_never_looser() {
        for seed in 0..5 {
            let mut st = LsqStats::new(4, 3, 3, 1, 1.0).unwrap();
            for (k, steps) in random_walks(4, 3, 3, 300, seed).into_iter().enumerate() {
                let x = [0.2 + 0.001 * (k % 7) as f64, 0.3, 0.5];
                let t = EpisodeTrace { episode: k as u64, context_r: Some(x.to_vec()), context_p: Some(vec![1.0]), steps };
                st.update(&t).unwrap();
            }
            let x = [0.2, 0.3, 0.5];
            let plain = plan_optimistic_si(&st, &EllipsoidConfig { planner: SiPlanner::Plain, ..Default::default() }, 3, &x, &[1.0]).unwrap();
            let mc = plan_optimistic_si(&st, &EllipsoidConfig::default(), 3, &x, &[1.0]).unwrap();
            assert!(mc.bounds.invariant_failures().is_empty());
            for s in 0..4 {
                assert!(mc.bounds.v_upper[0][s] <= plain.bounds.v_upper[0][s] + 1e-9);
            }
        }
    }

    #[test]
    fn single_step_bounds_bracket_the_mean() {
        let mut st = LsqStats::new(1, 1, 1, 1, 1.0).unwrap();
        for i in 0..20_000u64 {
            let r = if i % 4 == 0 { 1.0 } else { 0.0 };
            let t = EpisodeTrace {
                episode: i,
                context_r: Some(vec![1.0]),
                context_p: Some(vec![1.0]),
                steps: vec![Step { state: 0, action: 0, reward: r, next_state: 0 }],
            };
            st.update(&t).unwrap();
        }
        let c = plan_optimistic_si(&st, &EllipsoidConfig::default(), 1, &[1.0], &[1.0]).unwrap().bounds.certificate(0);
        assert!(c.lo <= 0.25 && 0.25 <= c.hi && c.epsilon < 0.1, "{c:?}");
    }
}
