use serde::{Deserialize, Serialize};

use super::bonus::{bonus_refined_lower, bonus_refined_upper, bonus_simple, WidthInputs};
use super::confidence::{ConfidenceVariant, Phi};
use super::stats::VisitStats;
use crate::bounds::ValueBounds;
use crate::error::{Error, Result};
use crate::mdp::expect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BonusKind {
    /// One width for both bounds.
    Simple,
    /// Separate, minimum-of-candidates widths for the upper and lower bound.
    #[default]
    Refined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceConfig {
    pub delta: f64,
    #[serde(default)]
    pub variant: ConfidenceVariant,
    #[serde(default)]
    pub bonus: BonusKind,
}

impl Default for ConfidenceConfig {
    fn default() -> Self {
        Self { delta: 0.1, variant: ConfidenceVariant::Appendix, bonus: BonusKind::Refined }
    }
}

impl ConfidenceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.delta > 0.0 && self.delta < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter { name: "delta", reason: format!("{} not in (0,1)", self.delta) })
        }
    }
}

/// Backward induction on the empirical model with clipped upper and lower
/// confidence bounds. Unvisited pairs get the trivial interval `[0, V^max_h]`.
pub fn plan_optimistic(stats: &VisitStats, config: &ConfidenceConfig) -> ValueBounds {
    let (ns, na, nh) = (stats.states, stats.actions, stats.horizon);
    let phi = Phi::new(ns, na, nh, config.delta, config.variant);
    let mut b = ValueBounds::new(nh, ns, na);
    for h in (0..nh).rev() {
        let vmax = (nh - h) as f64;
        let hi_next = b.v_upper[h + 1].clone();
        let lo_next = b.v_lower[h + 1].clone();
        for s in 0..ns {
            for a in 0..na {
                let i = b.idx(h, s, a);
                let n = stats.count(s, a);
                if n == 0 {
                    b.q_upper[i] = vmax;
                    b.q_lower[i] = 0.0;
                    continue;
                }
                let p = stats.p_row(s, a);
                let x = WidthInputs {
                    p_hat: p,
                    v_upper_next: &hi_next,
                    v_lower_next: &lo_next,
                    phi: phi.eval(n),
                    vmax_next: vmax - 1.0,
                    states: ns,
                    horizon: nh,
                };
                let (w_up, w_lo) = match config.bonus {
                    BonusKind::Simple => {
                        let w = bonus_simple(&x);
                        (w, w)
                    }
                    BonusKind::Refined => (bonus_refined_upper(&x), bonus_refined_lower(&x)),
                };
                let r = stats.reward(s, a);
                b.q_upper[i] = (r + expect(p, &hi_next) + w_up).max(0.0).min(vmax);
                b.q_lower[i] = (r + expect(p, &lo_next) - w_lo).max(0.0).min(vmax);
            }
            b.finish_state(h, s);
        }
    }
    b
}
