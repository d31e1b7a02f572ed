//! Confidence widths for the tabular planner.
//!
//! All widths are built from the same summaries of the next-step bounds under
//! the empirical transition row: the spread of the upper values, the expected
//! gap `P(V~ - V_)`, its second moment, its L1 norm, and the
//! `sum sqrt(p) * gap` cross term.

const SQRT12: f64 = 3.464_101_615_137_754_6;

/// Standard deviation of `v` under the distribution `p`.
pub fn sigma_hat(p: &[f64], v: &[f64]) -> f64 {
    let mean: f64 = p.iter().zip(v).map(|(q, x)| q * x).sum();
    let var: f64 = p.iter().zip(v).map(|(q, x)| q * (x - mean) * (x - mean)).sum();
    var.max(0.0).sqrt()
}

/// Inputs shared by every width at one `(s, a, h)`.
#[derive(Debug, Clone, Copy)]
pub struct WidthInputs<'a> {
    pub p_hat: &'a [f64],
    pub v_upper_next: &'a [f64],
    pub v_lower_next: &'a [f64],
    pub phi: f64,
    /// `V^max_{h+1}`.
    pub vmax_next: f64,
    pub states: usize,
    pub horizon: usize,
}

/// Per-row summaries used by the widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSummary {
    pub sigma_upper: f64,
    pub gap_mean: f64,
    pub gap_second_moment: f64,
    pub gap_l1: f64,
    pub sqrt_p_gap: f64,
}

impl WidthInputs<'_> {
    pub fn summary(&self) -> RowSummary {
        let mut gap_mean = 0.0;
        let mut gap_second_moment = 0.0;
        let mut gap_l1 = 0.0;
        let mut sqrt_p_gap = 0.0;
        for ((p, hi), lo) in self.p_hat.iter().zip(self.v_upper_next).zip(self.v_lower_next) {
            let g = hi - lo;
            gap_mean += p * g;
            gap_second_moment += p * g * g;
            gap_l1 += g.abs();
            sqrt_p_gap += p.max(0.0).sqrt() * g;
        }
        RowSummary {
            sigma_upper: sigma_hat(self.p_hat, self.v_upper_next),
            gap_mean,
            gap_second_moment,
            gap_l1,
            sqrt_p_gap,
        }
    }
}

/// Width used for both bounds in the simple planner:
/// `(1 + sqrt12 sigma) phi + 45 S H^2 phi^2 + P(V~ - V_) / H`.
pub fn bonus_simple(x: &WidthInputs) -> f64 {
    let r = x.summary();
    let (phi, s, h) = (x.phi, x.states as f64, x.horizon as f64);
    (1.0 + SQRT12 * r.sigma_upper) * phi + 45.0 * s * h * h * phi * phi + r.gap_mean / h
}

/// The three candidate upper widths; the refined width is their minimum.
pub fn refined_upper_terms(x: &WidthInputs) -> [f64; 3] {
    let r = x.summary();
    let (phi, h, vn) = (x.phi, x.horizon as f64, x.vmax_next);
    let phi2 = phi * phi;
    [
        (vn + 1.0) * phi,
        (1.0 + SQRT12 * (r.sigma_upper * r.sigma_upper + r.gap_second_moment).sqrt()) * phi + 8.13 * vn * phi2,
        (1.0 + SQRT12 * r.sigma_upper) * phi + r.gap_mean / h + 20.13 * h * r.gap_l1 * phi2,
    ]
}

/// The four candidate lower widths; the refined width is their minimum.
pub fn refined_lower_terms(x: &WidthInputs) -> [f64; 4] {
    let r = x.summary();
    let (phi, h, vn, s) = (x.phi, x.horizon as f64, x.vmax_next, x.states as f64);
    let phi2 = phi * phi;
    let cross = 2.0 * r.sqrt_p_gap;
    [
        (2.0 * s.sqrt() * vn + 1.0) * phi,
        (vn + 1.0 + cross) * phi + 4.66 * r.gap_l1 * phi2,
        (SQRT12 * (r.sigma_upper * r.sigma_upper + r.gap_second_moment).sqrt() + 1.0 + cross) * phi
            + (8.13 * vn + 4.66 * r.gap_l1) * phi2,
        (1.0 + SQRT12 * r.sigma_upper) * phi
            + r.gap_mean / h
            + (8.13 * vn + (32.0 * h + 4.66) * r.gap_l1) * phi2,
    ]
}

fn min_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn bonus_refined_upper(x: &WidthInputs) -> f64 {
    min_of(&refined_upper_terms(x))
}

pub fn bonus_refined_lower(x: &WidthInputs) -> f64 {
    min_of(&refined_lower_terms(x))
}
