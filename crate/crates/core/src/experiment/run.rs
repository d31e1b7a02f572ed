use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{
    build_instance, constant_context_mdp, tabular_as_contextual, BuiltInstance, EnvironmentSpec, ExperimentConfig,
    Fault,
};
use super::ExperimentError;
use crate::bounds::{Certificate, EpisodeOutput};
use crate::harness::{audit_episode, audit_with_optimum, Aggregator, EpisodeClaim, IpocMetrics, RunRecord};
use crate::mdp::{solve_exact, ContextSampler, GeneratorMeta, TabularMdp};
use crate::orlc::OrlcRunner;
use crate::si::OrlcSiRunner;

pub const REPORT_SCHEMA_VERSION: &str = "orlc.report.v1";
pub const RECORD_SCHEMA_VERSION: &str = "orlc.records.v1";

/// Per-seed report written next to the record file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IpocReport {
    pub schema_version: String,
    /// `tabular` for ORLC runs, `contextual` for ORLC-SI runs.
    pub kind: String,
    pub algorithm: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    /// Planner cells where the probability box missed the simplex.
    pub box_fallbacks: u64,
    pub record_schema_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records_file: Option<String>,
    #[serde(flatten)]
    pub metrics: IpocMetrics,
}

fn corrupt(c: Certificate, fault: Option<Fault>) -> Certificate {
    match fault {
        None => c,
        Some(Fault::ZeroCertificate) => Certificate::new(c.hi, c.hi),
    }
}

fn claim(out: &EpisodeOutput, fault: Option<Fault>) -> EpisodeClaim<'_> {
    let mut c = EpisodeClaim::from(out);
    c.certificate = corrupt(c.certificate, fault);
    c
}

/// Run one seed, auditing every episode. Each record is passed to `sink` in
/// episode order.
pub fn simulate(
    cfg: &ExperimentConfig,
    seed: u64,
    base_dir: &Path,
    mut sink: impl FnMut(&RunRecord) -> Result<(), ExperimentError>,
) -> Result<IpocReport, ExperimentError> {
    let instance = build_instance(&cfg.environment, cfg.reward_noise, seed, base_dir)?;
    let mut agg = Aggregator::new(&cfg.thresholds, &cfg.pac_levels, cfg.correlation_stride);
    let mut box_fallbacks = 0;
    let mut record = |r: RunRecord, agg: &mut Aggregator| -> Result<(), ExperimentError> {
        agg.push(&r);
        sink(&r)
    };
    let kind;
    if let Some(conf) = cfg.algorithm.tabular() {
        kind = "tabular";
        let env: TabularMdp = match instance {
            BuiltInstance::Tabular(m) => m,
            BuiltInstance::Contextual(c) => constant_context_mdp(&c).ok_or_else(|| {
                ExperimentError::Config("orlc needs a tabular environment or constant contexts".into())
            })??,
        };
        let opt = solve_exact(&env)?;
        let mut runner = OrlcRunner::new(env.clone(), conf, seed)?;
        for _ in 0..cfg.episodes {
            let out = runner.next_episode();
            let c = claim(&out, cfg.fault);
            let r = audit_with_optimum(&env, opt.optimal_return(c.start), c)?;
            record(r, &mut agg)?;
        }
    } else {
        kind = "contextual";
        let conf = cfg.algorithm.contextual().expect("algorithm is contextual");
        let env = match instance {
            BuiltInstance::Tabular(m) => tabular_as_contextual(&m),
            BuiltInstance::Contextual(c) => c,
        };
        let tagged = matches!(&env.context_r, ContextSampler::Dirichlet { phases } if phases.len() > 1);
        let mut runner = OrlcSiRunner::new(env, conf, seed)?;
        for _ in 0..cfg.episodes {
            let ep = runner.next_episode()?;
            box_fallbacks += ep.box_fallbacks;
            let mut r = audit_episode(&ep.realized, claim(&ep.output, cfg.fault))?;
            if tagged {
                r.context_tag = Some(format!("phase-{}", ep.phase));
            }
            record(r, &mut agg)?;
        }
    }
    Ok(IpocReport {
        schema_version: REPORT_SCHEMA_VERSION.into(),
        kind: kind.into(),
        algorithm: cfg.algorithm.name().into(),
        name: cfg.run_name(),
        preset: cfg.preset.clone(),
        seed,
        fault: cfg.fault,
        box_fallbacks,
        record_schema_version: RECORD_SCHEMA_VERSION.into(),
        records_file: None,
        metrics: agg.finish(),
    })
}

/// Which episodes go into the record file.
#[derive(Debug, Clone, Copy)]
pub struct RecordFilter {
    pub episodes: u64,
    pub stride: u64,
    pub keep_head: u64,
    pub keep_tail: u64,
}

impl RecordFilter {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            episodes: cfg.episodes,
            stride: cfg.output.stride,
            keep_head: cfg.output.keep_head,
            keep_tail: cfg.output.keep_tail,
        }
    }

    pub fn keep(&self, r: &RunRecord) -> bool {
        r.is_violation()
            || r.k <= self.keep_head
            || r.k + self.keep_tail > self.episodes
            || r.k.is_multiple_of(self.stride)
    }
}

/// Files written for one seed.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub report: IpocReport,
    pub records_path: PathBuf,
    pub report_path: PathBuf,
    pub records_written: u64,
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.to_path_buf(), source }
}

fn generator_meta(cfg: &ExperimentConfig, seed: u64) -> Option<GeneratorMeta> {
    let name = match &cfg.environment {
        EnvironmentSpec::RandomTabular { .. } => "random-tabular",
        EnvironmentSpec::RandomContextual { .. } => "random-contextual",
        EnvironmentSpec::Bandit { .. } => "bandit",
        EnvironmentSpec::File { .. } => return None,
    };
    let params = serde_json::to_value(&cfg.environment).unwrap_or_default();
    Some(GeneratorMeta { name: name.into(), seed, params })
}

/// Run one seed and write `<name>-seed<seed>.jsonl`, `.report.json` and
/// `.instance.json` into `out_dir`.
pub fn run_seed(cfg: &ExperimentConfig, seed: u64, out_dir: &Path, base_dir: &Path) -> Result<SeedRun, ExperimentError> {
    let stem = format!("{}-seed{}", cfg.run_name(), seed);
    let records_path = out_dir.join(format!("{stem}.jsonl"));
    let report_path = out_dir.join(format!("{stem}.report.json"));
    let instance_path = out_dir.join(format!("{stem}.instance.json"));

    let instance = build_instance(&cfg.environment, cfg.reward_noise, seed, base_dir)?;
    instance.to_document(generator_meta(cfg, seed)).write(&instance_path).map_err(io_err(&instance_path))?;

    let file = File::create(&records_path).map_err(io_err(&records_path))?;
    let mut w = BufWriter::new(file);
    let filter = RecordFilter::from_config(cfg);
    let mut written = 0;
    let mut report = simulate(cfg, seed, base_dir, |r| {
        if filter.keep(r) {
            serde_json::to_writer(&mut w, r).expect("records serialize");
            w.write_all(b"\n").map_err(io_err(&records_path))?;
            written += 1;
        }
        Ok(())
    })?;
    w.flush().map_err(io_err(&records_path))?;
    report.records_file = records_path.file_name().map(|n| n.to_string_lossy().into_owned());
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    fs::write(&report_path, text + "\n").map_err(io_err(&report_path))?;
    Ok(SeedRun { seed, report, records_path, report_path, records_written: written })
}

/// Run every seed of the config, in parallel, into `cfg.output_dir()`.
/// Results come back in seed order.
pub fn run_experiment(cfg: &ExperimentConfig, base_dir: &Path) -> Result<Vec<SeedRun>, ExperimentError> {
    cfg.validate()?;
    let out_dir = cfg.output_dir();
    fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;
    cfg.seeds.par_iter().map(|&seed| run_seed(cfg, seed, &out_dir, base_dir)).collect()
}
