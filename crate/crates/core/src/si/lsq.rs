use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::EpisodeTrace;

/// Regularized least-squares sufficient statistics per `(s, a)`.
///
/// Gram matrices are stored row-major, `d x d`, starting at `lambda * I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsqStats {
    pub states: usize,
    pub actions: usize,
    pub dim_r: usize,
    pub dim_p: usize,
    pub lambda: f64,
    /// `gram_r[s * A + a]`.
    pub gram_r: Vec<Vec<f64>>,
    pub gram_p: Vec<Vec<f64>>,
    /// Reward-weighted context sums, `target_r[s * A + a]`.
    pub target_r: Vec<Vec<f64>>,
    /// Successor-indicator context sums, `target_p[(s * A + a) * S + s']`.
    pub target_p: Vec<Vec<f64>>,
    pub visits: Vec<u64>,
}

fn scaled_identity(d: usize, lambda: f64) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = lambda;
    }
    m
}

fn add_outer(m: &mut [f64], x: &[f64]) {
    let d = x.len();
    for i in 0..d {
        for j in 0..d {
            m[i * d + j] += x[i] * x[j];
        }
    }
}

impl LsqStats {
    pub fn new(states: usize, actions: usize, dim_r: usize, dim_p: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter { name: "lambda", reason: format!("{lambda} must be positive") });
        }
        let pairs = states * actions;
        Ok(Self {
            states,
            actions,
            dim_r,
            dim_p,
            lambda,
            gram_r: vec![scaled_identity(dim_r, lambda); pairs],
            gram_p: vec![scaled_identity(dim_p, lambda); pairs],
            target_r: vec![vec![0.0; dim_r]; pairs],
            target_p: vec![vec![0.0; dim_p]; pairs * states],
            visits: vec![0; pairs],
        })
    }

    #[inline]
    pub fn pair(&self, s: usize, a: usize) -> usize {
        s * self.actions + a
    }

    /// One rank-one update per visited `(s, a, h)`.
    pub fn update(&mut self, trace: &EpisodeTrace) -> Result<()> {
        let x_r = trace.context_r.as_deref().ok_or(Error::DimensionMismatch {
            what: "trace reward context",
            expected: self.dim_r,
            got: 0,
        })?;
        let x_p = trace.context_p.as_deref().ok_or(Error::DimensionMismatch {
            what: "trace transition context",
            expected: self.dim_p,
            got: 0,
        })?;
        if x_r.len() != self.dim_r {
            return Err(Error::DimensionMismatch { what: "reward context", expected: self.dim_r, got: x_r.len() });
        }
        if x_p.len() != self.dim_p {
            return Err(Error::DimensionMismatch { what: "transition context", expected: self.dim_p, got: x_p.len() });
        }
        for step in &trace.steps {
            let i = self.pair(step.state, step.action);
            add_outer(&mut self.gram_r[i], x_r);
            add_outer(&mut self.gram_p[i], x_p);
            for (t, x) in self.target_r[i].iter_mut().zip(x_r) {
                *t += x * step.reward;
            }
            for (t, x) in self.target_p[i * self.states + step.next_state].iter_mut().zip(x_p) {
                *t += x;
            }
            self.visits[i] += 1;
        }
        Ok(())
    }
}

/// Cholesky factor of one Gram matrix, reused for solves, norms and the
/// log-determinant.
pub struct Ellipsoid {
    chol: Cholesky<f64, Dyn>,
    dim: usize,
    /// `ln det N - d ln lambda`.
    pub log_det_ratio: f64,
}

impl Ellipsoid {
    pub fn factor(gram: &[f64], dim: usize, lambda: f64) -> Result<Self> {
        if gram.len() != dim * dim {
            return Err(Error::DimensionMismatch { what: "gram matrix", expected: dim * dim, got: gram.len() });
        }
        let m = DMatrix::from_row_slice(dim, dim, gram);
        let chol = m.cholesky().ok_or(Error::NotPositiveDefinite("gram matrix"))?;
        let log_det: f64 = chol.l_dirty().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        Ok(Self { chol, dim, log_det_ratio: log_det - dim as f64 * lambda.ln() })
    }

    /// `N^{-1} x`.
    pub fn solve(&self, x: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(x);
        self.chol.solve(&v).iter().copied().collect()
    }

    /// `sqrt(x^T N^{-1} x)`.
    pub fn norm_inv(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let v = DVector::from_column_slice(x);
        let l = self.chol.l();
        let y = l.solve_lower_triangular(&v).expect("cholesky factor has a positive diagonal");
        y.norm()
    }

    /// Ellipsoid confidence width
    /// `[sqrt(lambda) xi + sqrt(ln(1/delta')/2 + ln(det N / det(lambda I))/4)] |x|_{N^{-1}}`.
    pub fn width(&self, x: &[f64], xi: f64, lambda: f64, log_inv_delta: f64) -> f64 {
        self.width_with_norm(self.norm_inv(x), xi, lambda, log_inv_delta)
    }

    pub fn width_with_norm(&self, norm: f64, xi: f64, lambda: f64, log_inv_delta: f64) -> f64 {
        let radius = lambda.sqrt() * xi + (0.5 * log_inv_delta + 0.25 * self.log_det_ratio).max(0.0).sqrt();
        radius * norm
    }
}

/// `ln(S (S A + A + H) / delta)`, the union-bound log term of the widths.
pub fn ellipsoid_log_inv_delta(states: usize, actions: usize, horizon: usize, delta: f64) -> f64 {
    let (s, a, h) = (states as f64, actions as f64, horizon as f64);
    (s * (s * a + a + h) / delta).ln()
}

/// Width for Gram matrix `gram` (row-major, `d x d`) at context `x`.
/// `union_count` is the `S (SA + A + H)` factor dividing `delta`.
pub fn ellipsoid_width(
    gram: &[f64],
    x: &[f64],
    xi: f64,
    delta: f64,
    lambda: f64,
    union_count: f64,
) -> Result<f64> {
    let e = Ellipsoid::factor(gram, x.len(), lambda)?;
    Ok(e.width(x, xi, lambda, (union_count / delta).ln()))
}

/// Clipped point estimates for one pair at the given contexts, plus the
/// factorizations used to get them.
pub struct PairModel {
    pub r_hat: f64,
    /// Clipped to `[0,1]` per coordinate, not renormalized.
    pub p_hat: Vec<f64>,
    pub norm_r: f64,
    pub norm_p: f64,
    pub reward_ellipsoid: Ellipsoid,
    pub transition_ellipsoid: Ellipsoid,
}

pub fn model_point_estimates(stats: &LsqStats, s: usize, a: usize, x_r: &[f64], x_p: &[f64]) -> Result<PairModel> {
    if x_r.len() != stats.dim_r {
        return Err(Error::DimensionMismatch { what: "reward context", expected: stats.dim_r, got: x_r.len() });
    }
    if x_p.len() != stats.dim_p {
        return Err(Error::DimensionMismatch { what: "transition context", expected: stats.dim_p, got: x_p.len() });
    }
    let i = stats.pair(s, a);
    let er = Ellipsoid::factor(&stats.gram_r[i], stats.dim_r, stats.lambda)?;
    let ep = Ellipsoid::factor(&stats.gram_p[i], stats.dim_p, stats.lambda)?;
    // x^T N^{-1} M = (N^{-1} x)^T M since N is symmetric
    let ur = er.solve(x_r);
    let up = ep.solve(x_p);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let r_hat = dot(&ur, &stats.target_r[i]).clamp(0.0, 1.0);
    let p_hat = (0..stats.states)
        .map(|sn| dot(&up, &stats.target_p[i * stats.states + sn]).clamp(0.0, 1.0))
        .collect();
    let norm_r = dot(x_r, &ur).max(0.0).sqrt();
    let norm_p = dot(x_p, &up).max(0.0).sqrt();
    Ok(PairModel { r_hat, p_hat, norm_r, norm_p, reward_ellipsoid: er, transition_ellipsoid: ep })
}
