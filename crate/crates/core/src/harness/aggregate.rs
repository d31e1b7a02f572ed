use serde::{Deserialize, Serialize};

use super::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MistakeCount {
    pub threshold: f64,
    /// Episodes with `epsilon > threshold`.
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacTime {
    pub epsilon: f64,
    /// First episode with a certificate at most `epsilon`.
    pub episode: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Correlation {
    /// Sample Pearson correlation; 0 when degenerate.
    pub value: f64,
    /// Set when either series has zero variance or fewer than two samples.
    pub degenerate: bool,
    pub samples: u64,
}

/// Run-level metrics over a sequence of audited episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IpocMetrics {
    pub episodes: u64,
    /// Gap violations plus interval violations.
    pub validity_violations: u64,
    pub gap_violations: u64,
    pub interval_violations: u64,
    pub cumulative_certificates: f64,
    pub regret: f64,
    /// `max_T (sum_{k<=T} gap_k - sum_{k<=T} epsilon_k)`.
    pub max_prefix_excess: f64,
    pub mistake_counts: Vec<MistakeCount>,
    pub pearson_correlation: Correlation,
    pub pac_times: Vec<PacTime>,
    pub final_epsilon: f64,
}

/// Streaming form of [`aggregate`], for runs too long to keep in memory.
#[derive(Debug, Clone)]
pub struct Aggregator {
    stride: u64,
    episodes: u64,
    gap_violations: u64,
    interval_violations: u64,
    cum_eps: f64,
    regret: f64,
    max_prefix_excess: f64,
    mistakes: Vec<MistakeCount>,
    pac: Vec<PacTime>,
    final_epsilon: f64,
    // Welford co-moments of (epsilon, gap)
    n: u64,
    mean_x: f64,
    mean_y: f64,
    m2_x: f64,
    m2_y: f64,
    c_xy: f64,
}

impl Aggregator {
    /// `stride` sub-samples the correlation only (every `stride`-th episode
    /// index); all other metrics use every record.
    pub fn new(thresholds: &[f64], pac_levels: &[f64], stride: u64) -> Self {
        Self {
            stride: stride.max(1),
            episodes: 0,
            gap_violations: 0,
            interval_violations: 0,
            cum_eps: 0.0,
            regret: 0.0,
            max_prefix_excess: f64::NEG_INFINITY,
            mistakes: thresholds.iter().map(|&threshold| MistakeCount { threshold, count: 0 }).collect(),
            pac: pac_levels.iter().map(|&epsilon| PacTime { epsilon, episode: None }).collect(),
            final_epsilon: f64::NAN,
            n: 0,
            mean_x: 0.0,
            mean_y: 0.0,
            m2_x: 0.0,
            m2_y: 0.0,
            c_xy: 0.0,
        }
    }

    pub fn push(&mut self, r: &RunRecord) {
        self.episodes += 1;
        self.gap_violations += r.gap_violation as u64;
        self.interval_violations += r.interval_violation as u64;
        self.cum_eps += r.epsilon;
        self.regret += r.gap;
        self.max_prefix_excess = self.max_prefix_excess.max(self.regret - self.cum_eps);
        for m in &mut self.mistakes {
            m.count += (r.epsilon > m.threshold) as u64;
        }
        for p in &mut self.pac {
            if p.episode.is_none() && r.epsilon <= p.epsilon {
                p.episode = Some(r.k);
            }
        }
        self.final_epsilon = r.epsilon;
        if r.k.is_multiple_of(self.stride) {
            self.n += 1;
            let n = self.n as f64;
            let dx = r.epsilon - self.mean_x;
            self.mean_x += dx / n;
            let dy = r.gap - self.mean_y;
            self.mean_y += dy / n;
            self.m2_x += dx * (r.epsilon - self.mean_x);
            self.m2_y += dy * (r.gap - self.mean_y);
            self.c_xy += dx * (r.gap - self.mean_y);
        }
    }

    pub fn finish(&self) -> IpocMetrics {
        let degenerate = self.n < 2 || self.m2_x <= 0.0 || self.m2_y <= 0.0;
        let value = if degenerate { 0.0 } else { (self.c_xy / (self.m2_x * self.m2_y).sqrt()).clamp(-1.0, 1.0) };
        IpocMetrics {
            episodes: self.episodes,
            validity_violations: self.gap_violations + self.interval_violations,
            gap_violations: self.gap_violations,
            interval_violations: self.interval_violations,
            cumulative_certificates: self.cum_eps,
            regret: self.regret,
            max_prefix_excess: if self.episodes == 0 { 0.0 } else { self.max_prefix_excess },
            mistake_counts: self.mistakes.clone(),
            pearson_correlation: Correlation { value, degenerate, samples: self.n },
            pac_times: self.pac.clone(),
            final_epsilon: self.final_epsilon,
        }
    }
}

pub fn aggregate(records: &[RunRecord], thresholds: &[f64], pac_levels: &[f64]) -> IpocMetrics {
    let mut agg = Aggregator::new(thresholds, pac_levels, 1);
    for r in records {
        agg.push(r);
    }
    agg.finish()
}

/// Two-pass sample correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Correlation {
    let n = xs.len().min(ys.len());
    let samples = n as u64;
    if n < 2 {
        return Correlation { value: 0.0, degenerate: true, samples };
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs[..n].iter().zip(&ys[..n]) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Correlation { value: 0.0, degenerate: true, samples };
    }
    Correlation { value: (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0), degenerate: false, samples }
}

/// Episode index of the first record with `epsilon_k <= epsilon`.
pub fn pac_extraction(records: &[RunRecord], epsilon: f64) -> Option<u64> {
    records.iter().find(|r| r.epsilon <= epsilon).map(|r| r.k)
}

/// [`pac_extraction`] by binary search; valid when the certificates are
/// nonincreasing along `records`.
pub fn pac_extraction_monotone(records: &[RunRecord], epsilon: f64) -> Option<u64> {
    let i = records.partition_point(|r| r.epsilon > epsilon);
    records.get(i).map(|r| r.k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(k: u64, epsilon: f64, gap: f64) -> RunRecord {
        RunRecord {
            k,
            epsilon,
            interval_lo: 0.0,
            interval_hi: epsilon,
            gap,
            policy_return: 0.0,
            optimal_return: gap,
            realized_reward: 0.0,
            context_tag: None,
            gap_violation: gap > epsilon + 1e-9,
            interval_violation: false,
        }
    }

    fn series(eps: &[f64], gaps: &[f64]) -> Vec<RunRecord> {
        eps.iter().zip(gaps).enumerate().map(|(i, (e, g))| rec(i as u64 + 1, *e, *g)).collect()
    }

    #[test]
    fn mistake_count_example() {
        let m = aggregate(&series(&[4.0, 0.5, 0.05], &[0.0; 3]), &[0.1], &[]);
        assert_eq!(m.mistake_counts, vec![MistakeCount { threshold: 0.1, count: 2 }]);
    }

    #[test]
    fn identical_series_correlate_perfectly() {
        let e = [3.0, 1.0, 0.4, 0.2, 0.7];
        let m = aggregate(&series(&e, &e), &[], &[]);
        assert!((m.pearson_correlation.value - 1.0).abs() < 1e-12);
        assert!(!m.pearson_correlation.degenerate);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let m = aggregate(&series(&[1.0, 0.5, 0.2], &[0.0; 3]), &[], &[]);
        assert_eq!(m.pearson_correlation.value, 0.0);
        assert!(m.pearson_correlation.degenerate);
        assert!(pearson(&[1.0], &[2.0]).degenerate);
    }

    #[test]
    fn pac_examples() {
        let r = series(&[4.0, 2.0, 1.0, 0.5], &[0.0; 4]);
        assert_eq!(pac_extraction(&r, 4.0), Some(1));
        assert_eq!(pac_extraction(&r, 0.7), Some(4));
        assert_eq!(pac_extraction(&r, 0.1), None);
        assert_eq!(pac_extraction_monotone(&r, 0.1), None);
        let m = aggregate(&r, &[], &[1.5, 0.1]);
        assert_eq!(m.pac_times[0].episode, Some(3));
        assert_eq!(m.pac_times[1].episode, None);
    }

    #[test]
    fn prefix_excess_detects_a_late_violation() {
        let m = aggregate(&series(&[1.0, 0.5, 0.1], &[0.2, 0.1, 0.0]), &[], &[]);
        assert!((m.max_prefix_excess - -0.8).abs() < 1e-12);
        let m = aggregate(&series(&[1.0, 0.0, 0.0], &[0.2, 0.5, 0.5]), &[], &[]);
        assert!((m.max_prefix_excess - 0.2).abs() < 1e-12);
        assert_eq!(m.gap_violations, 2);
        assert_eq!(m.validity_violations, 2);
    }

    proptest! {
        #[test]
        fn sums_and_correlation_match_recomputation(
            pairs in proptest::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..300),
            thresholds in proptest::collection::vec(0.0f64..5.0, 0..6),
        ) {
            let eps: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let gaps: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let r = series(&eps, &gaps);
            let m = aggregate(&r, &thresholds, &[]);
            prop_assert!((m.cumulative_certificates - eps.iter().sum::<f64>()).abs() < 1e-9);
            prop_assert!((m.regret - gaps.iter().sum::<f64>()).abs() < 1e-9);
            let p = pearson(&eps, &gaps);
            prop_assert_eq!(p.degenerate, m.pearson_correlation.degenerate);
            prop_assert!((p.value - m.pearson_correlation.value).abs() < 1e-9);
            for (t, mc) in thresholds.iter().zip(&m.mistake_counts) {
                prop_assert_eq!(mc.count, eps.iter().filter(|e| *e > t).count() as u64);
            }
            let mut sorted = m.mistake_counts.clone();
            sorted.sort_by(|a, b| a.threshold.total_cmp(&b.threshold));
            prop_assert!(sorted.windows(2).all(|w| w[0].count >= w[1].count));
            if m.validity_violations == 0 {
                prop_assert!(m.regret <= m.cumulative_certificates + 1e-9 * r.len() as f64);
            }
        }

        #[test]
        fn binary_search_matches_linear_scan(
            mut eps in proptest::collection::vec(0.0f64..10.0, 1..200),
            level in 0.0f64..10.0,
        ) {
            eps.sort_by(|a, b| b.total_cmp(a));
            eps.dedup();
            let r = series(&eps, &vec![0.0; eps.len()]);
            prop_assert_eq!(pac_extraction(&r, level), pac_extraction_monotone(&r, level));
            let m = aggregate(&r, &[level], &[level]);
            if let Some(k) = m.pac_times[0].episode {
                prop_assert!(k <= m.mistake_counts[0].count + 1);
            }
        }
    }
}
