use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::{IpocReport, REPORT_SCHEMA_VERSION};
use super::ExperimentError;
use crate::harness::RunRecord;

pub const SUMMARY_SCHEMA_VERSION: &str = "orlc.summary.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricSummary {
    pub name: String,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Reports in which the metric was defined.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub schema_version: String,
    pub kind: String,
    pub seeds: Vec<u64>,
    pub metrics: Vec<MetricSummary>,
}

impl Summary {
    pub fn metric(&self, name: &str) -> Option<&MetricSummary> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn to_table(&self) -> String {
        let width = self.metrics.iter().map(|m| m.name.len()).max().unwrap_or(6).max(6);
        let mut out = String::new();
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "{} runs ({}), seeds {}", self.seeds.len(), self.kind, seeds.join(","));
        let _ = writeln!(out, "{:<width$}  {:>14}  {:>14}  {:>14}", "metric", "mean", "min", "max");
        for m in &self.metrics {
            if m.count == 0 {
                let _ = writeln!(out, "{:<width$}  {:>14}  {:>14}  {:>14}", m.name, "-", "-", "-");
            } else {
                let _ = writeln!(out, "{:<width$}  {:>14.6}  {:>14.6}  {:>14.6}", m.name, m.mean, m.min, m.max);
            }
        }
        out
    }
}

fn summarize_values(name: String, values: &[Option<f64>]) -> MetricSummary {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    let count = defined.len();
    if count == 0 {
        return MetricSummary { name, mean: f64::NAN, min: f64::NAN, max: f64::NAN, count };
    }
    MetricSummary {
        name,
        mean: defined.iter().sum::<f64>() / count as f64,
        min: defined.iter().copied().fold(f64::INFINITY, f64::min),
        max: defined.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        count,
    }
}

fn read_report(path: &Path) -> Result<IpocReport, ExperimentError> {
    let text = fs::read_to_string(path).map_err(|source| ExperimentError::Io { path: path.into(), source })?;
    let bad = |reason: String| ExperimentError::BadInput { path: path.into(), reason };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    match value.get("schemaVersion").and_then(|v| v.as_str()) {
        Some(REPORT_SCHEMA_VERSION) => {}
        other => return Err(bad(format!("schema {other:?} is not {REPORT_SCHEMA_VERSION}"))),
    }
    serde_json::from_value(value).map_err(|e| bad(e.to_string()))
}

/// Mean, min and max of each report metric across seeds.
pub fn summarize(paths: &[impl AsRef<Path>]) -> Result<Summary, ExperimentError> {
    let first = paths.first().ok_or_else(|| ExperimentError::Config("no report files given".into()))?;
    let reports = paths.iter().map(|p| read_report(p.as_ref())).collect::<Result<Vec<_>, _>>()?;
    let kind = reports[0].kind.clone();
    for (r, p) in reports.iter().zip(paths) {
        if r.kind != kind {
            return Err(ExperimentError::BadInput {
                path: p.as_ref().into(),
                reason: format!("schema mismatch: {} report mixed with {} ({})", r.kind, kind, first.as_ref().display()),
            });
        }
    }
    let col = |f: &dyn Fn(&IpocReport) -> Option<f64>| reports.iter().map(f).collect::<Vec<_>>();
    let mut metrics = vec![
        summarize_values("episodes".into(), &col(&|r| Some(r.metrics.episodes as f64))),
        summarize_values("validityViolations".into(), &col(&|r| Some(r.metrics.validity_violations as f64))),
        summarize_values("cumulativeCertificates".into(), &col(&|r| Some(r.metrics.cumulative_certificates))),
        summarize_values("regret".into(), &col(&|r| Some(r.metrics.regret))),
        summarize_values("maxPrefixExcess".into(), &col(&|r| Some(r.metrics.max_prefix_excess))),
        summarize_values(
            "pearsonCorrelation".into(),
            &col(&|r| (!r.metrics.pearson_correlation.degenerate).then_some(r.metrics.pearson_correlation.value)),
        ),
        summarize_values("finalEpsilon".into(), &col(&|r| Some(r.metrics.final_epsilon))),
    ];
    for (i, m) in reports[0].metrics.mistake_counts.iter().enumerate() {
        let vals = col(&|r| {
            r.metrics.mistake_counts.get(i).filter(|x| x.threshold == m.threshold).map(|x| x.count as f64)
        });
        metrics.push(summarize_values(format!("mistakes(eps>{})", m.threshold), &vals));
    }
    for (i, p) in reports[0].metrics.pac_times.iter().enumerate() {
        let vals = col(&|r| {
            r.metrics.pac_times.get(i).filter(|x| x.epsilon == p.epsilon).and_then(|x| x.episode).map(|k| k as f64)
        });
        metrics.push(summarize_values(format!("pacTime(eps<={})", p.epsilon), &vals));
    }
    Ok(Summary {
        schema_version: SUMMARY_SCHEMA_VERSION.into(),
        kind,
        seeds: reports.iter().map(|r| r.seed).collect(),
        metrics,
    })
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, ExperimentError> {
    let file = fs::File::open(path).map_err(|source| ExperimentError::Io { path: path.into(), source })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| ExperimentError::Io { path: path.into(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line)
            .map_err(|e| ExperimentError::BadInput { path: path.into(), reason: format!("line {}: {e}", i + 1) })?;
        out.push(r);
    }
    Ok(out)
}

/// Convert a record file to CSV with one header row.
pub fn export_csv(records: &Path, csv_path: &Path) -> Result<u64, ExperimentError> {
    let rows = read_records(records)?;
    let io = |e: csv::Error| ExperimentError::Io { path: csv_path.into(), source: e.into() };
    let mut w = csv::Writer::from_path(csv_path).map_err(io)?;
    w.write_record([
        "k",
        "epsilon",
        "intervalLo",
        "intervalHi",
        "gap",
        "policyReturn",
        "optimalReturn",
        "realizedReward",
        "contextTag",
        "gapViolation",
        "intervalViolation",
    ])
    .map_err(io)?;
    for r in &rows {
        w.write_record([
            r.k.to_string(),
            r.epsilon.to_string(),
            r.interval_lo.to_string(),
            r.interval_hi.to_string(),
            r.gap.to_string(),
            r.policy_return.to_string(),
            r.optimal_return.to_string(),
            r.realized_reward.to_string(),
            r.context_tag.clone().unwrap_or_default(),
            r.gap_violation.to_string(),
            r.interval_violation.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|source| ExperimentError::Io { path: csv_path.into(), source })?;
    Ok(rows.len() as u64)
}
