use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::presets::preset_toml;
use crate::error::{Error, Result};
use crate::mdp::{
    distribution_shift_phases, gen_bandit, gen_random_contextual, gen_random_tabular, ContextSampler,
    ContextualLinearMdp, Instance, InstanceDocument, RewardNoise, ShiftPhase, TabularMdp,
};
use crate::orlc::{BonusKind, ConfidenceConfig, ConfidenceVariant};
use crate::si::{EllipsoidConfig, SiPlanner};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "ORLC_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "orlc-out";

fn default_alpha() -> f64 {
    0.7
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvironmentSpec {
    /// Sparse-reward Dirichlet MDP generated from the run seed.
    RandomTabular { states: usize, actions: usize, horizon: usize },
    /// Linear contextual MDP. Contexts are `Dirichlet(context_alpha)` unless
    /// `shift_episode` is set, which selects the rare-coordinates schedule
    /// switching at that episode, or `phases` gives the schedule directly.
    RandomContextual {
        states: usize,
        actions: usize,
        horizon: usize,
        dim_r: usize,
        #[serde(default = "default_alpha")]
        context_alpha: f64,
        #[serde(default)]
        shift_episode: Option<u64>,
        #[serde(default)]
        phases: Option<Vec<ShiftPhase>>,
    },
    /// Random bandit; `dim_r = 1` is the context-free variant.
    Bandit { arms: usize, dim_r: usize },
    /// Instance document written by this crate.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    Orlc {
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default)]
        variant: ConfidenceVariant,
        #[serde(default)]
        bonus: BonusKind,
    },
    OrlcSi {
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default)]
        xi_theta_r: Option<f64>,
        #[serde(default)]
        xi_theta_p: Option<f64>,
        #[serde(default)]
        planner: SiPlanner,
    },
}

fn default_delta() -> f64 {
    0.1
}

fn default_lambda() -> f64 {
    1.0
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::Orlc { .. } => "orlc",
            AlgorithmSpec::OrlcSi { .. } => "orlc-si",
        }
    }

    pub fn delta(&self) -> f64 {
        match self {
            AlgorithmSpec::Orlc { delta, .. } | AlgorithmSpec::OrlcSi { delta, .. } => *delta,
        }
    }

    pub fn tabular(&self) -> Option<ConfidenceConfig> {
        match *self {
            AlgorithmSpec::Orlc { delta, variant, bonus } => Some(ConfidenceConfig { delta, variant, bonus }),
            _ => None,
        }
    }

    pub fn contextual(&self) -> Option<EllipsoidConfig> {
        match *self {
            AlgorithmSpec::OrlcSi { delta, lambda, xi_theta_r, xi_theta_p, planner } => {
                Some(EllipsoidConfig { delta, lambda, xi_theta_r, xi_theta_p, planner })
            }
            _ => None,
        }
    }
}

/// Deliberate corruption of the announced certificates, for checking that
/// the audit catches invalid output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Announce `[hi, hi]`, i.e. `epsilon = 0`.
    ZeroCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Resolved against the environment variable and the default when absent.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Keep every `stride`-th episode in the record file.
    #[serde(default = "default_stride")]
    pub stride: u64,
    /// Always keep the first and last this many episodes.
    #[serde(default = "default_keep")]
    pub keep_head: u64,
    #[serde(default = "default_keep")]
    pub keep_tail: u64,
}

fn default_stride() -> u64 {
    100
}

fn default_keep() -> u64 {
    1000
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, stride: default_stride(), keep_head: default_keep(), keep_tail: default_keep() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Prefix of output file names; defaults to the preset name.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub preset: Option<String>,
    pub environment: EnvironmentSpec,
    pub algorithm: AlgorithmSpec,
    pub episodes: u64,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub reward_noise: RewardNoise,
    #[serde(default)]
    pub thresholds: Vec<f64>,
    #[serde(default)]
    pub pac_levels: Vec<f64>,
    /// Correlation uses every `correlation_stride`-th episode.
    #[serde(default = "one")]
    pub correlation_stride: u64,
    #[serde(default)]
    pub fault: Option<Fault>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn one() -> u64 {
    1
}

/// Flag-level overrides applied on top of the file and preset.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub episodes: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub output_dir: Option<PathBuf>,
    pub stride: Option<u64>,
    pub fault: Option<Fault>,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::InvalidParameter { name: "config", reason: msg.into() }
}

/// `overlay` wins; tables merge key by key.
fn merge(base: &mut toml::Value, overlay: toml::Value) {
    match (base, overlay) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_table() && v.is_table() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

impl ExperimentConfig {
    /// Resolve a config from optional file text and flag overrides.
    ///
    /// Precedence, highest first: flags, the file, the preset named by the
    /// flags or the file, built-in defaults.
    pub fn resolve(file_text: Option<&str>, overrides: &Overrides) -> Result<Self> {
        let file: toml::Value = match file_text {
            Some(t) => toml::from_str(t).map_err(|e| config_error(format!("cannot parse config: {e}")))?,
            None => toml::Value::Table(Default::default()),
        };
        let preset = overrides
            .preset
            .clone()
            .or_else(|| file.get("preset").and_then(|v| v.as_str()).map(str::to_string));
        let mut merged = match &preset {
            Some(name) => {
                let text = preset_toml(name).ok_or_else(|| config_error(format!("unknown preset `{name}`")))?;
                toml::from_str(text).expect("built-in presets parse")
            }
            None => toml::Value::Table(Default::default()),
        };
        // switching the environment or algorithm kind replaces the table
        for key in ["environment", "algorithm"] {
            let kind = |v: &toml::Value| v.get(key).and_then(|t| t.get("kind")).cloned();
            if let (Some(a), Some(b)) = (kind(&merged), kind(&file)) {
                if a != b {
                    merged.as_table_mut().expect("table").remove(key);
                }
            }
        }
        merge(&mut merged, file);
        if let Some(p) = &preset {
            merged.as_table_mut().expect("table").insert("preset".into(), toml::Value::String(p.clone()));
        }
        let mut cfg: ExperimentConfig =
            merged.try_into().map_err(|e: toml::de::Error| config_error(format!("invalid config: {e}")))?;
        if let Some(e) = overrides.episodes {
            cfg.episodes = e;
        }
        if let Some(s) = &overrides.seeds {
            cfg.seeds = s.clone();
        }
        if let Some(d) = &overrides.output_dir {
            cfg.output.dir = Some(d.clone());
        }
        if let Some(s) = overrides.stride {
            cfg.output.stride = s;
        }
        if overrides.fault.is_some() {
            cfg.fault = overrides.fault;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_preset(name: &str) -> Result<Self> {
        Self::resolve(None, &Overrides { preset: Some(name.into()), ..Default::default() })
    }

    pub fn validate(&self) -> Result<()> {
        if self.episodes < 1 {
            return Err(config_error("episodes must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(config_error("seeds must not be empty"));
        }
        let d = self.algorithm.delta();
        if !(d > 0.0 && d < 1.0) {
            return Err(config_error(format!("delta = {d} is not in (0,1)")));
        }
        if let Some(c) = self.algorithm.contextual() {
            c.validate()?;
        }
        if self.output.stride < 1 || self.correlation_stride < 1 {
            return Err(config_error("strides must be at least 1"));
        }
        if self.pac_levels.iter().any(|e| e.is_nan() || *e <= 0.0) {
            return Err(config_error("pac levels must be positive"));
        }
        if let EnvironmentSpec::RandomContextual { dim_r, shift_episode, phases, .. } = &self.environment {
            if shift_episode.is_some() && phases.is_some() {
                return Err(config_error("give either shift_episode or phases, not both"));
            }
            if let Some(ph) = phases {
                if ph.is_empty() || ph.iter().any(|p| p.alpha.len() != *dim_r) {
                    return Err(config_error("every phase needs dim_r concentrations"));
                }
            }
        }
        match &self.environment {
            EnvironmentSpec::RandomTabular { states, actions, horizon }
            | EnvironmentSpec::RandomContextual { states, actions, horizon, .. } => {
                if *states == 0 || *actions == 0 || *horizon == 0 {
                    return Err(config_error("dimensions must be positive"));
                }
            }
            EnvironmentSpec::Bandit { arms, dim_r } => {
                if *arms == 0 || *dim_r == 0 {
                    return Err(config_error("dimensions must be positive"));
                }
            }
            EnvironmentSpec::File { .. } => {}
        }
        Ok(())
    }

    pub fn run_name(&self) -> String {
        self.name.clone().or_else(|| self.preset.clone()).unwrap_or_else(|| "run".into())
    }

    /// Explicit directory, else the environment variable, else the default.
    pub fn output_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// Instance for one seed, before any learner is attached.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltInstance {
    Tabular(TabularMdp),
    Contextual(ContextualLinearMdp),
}

impl BuiltInstance {
    pub fn to_document(&self, generator: Option<crate::mdp::GeneratorMeta>) -> InstanceDocument {
        let inst = match self {
            BuiltInstance::Tabular(m) => Instance::Tabular(m.clone()),
            BuiltInstance::Contextual(m) => Instance::Contextual(m.clone()),
        };
        InstanceDocument::new(inst, generator)
    }
}

pub fn build_instance(env: &EnvironmentSpec, noise: RewardNoise, seed: u64, base: &Path) -> Result<BuiltInstance> {
    let built = match env {
        EnvironmentSpec::RandomTabular { states, actions, horizon } => {
            BuiltInstance::Tabular(TabularMdp { reward_noise: noise, ..gen_random_tabular(*states, *actions, *horizon, seed) })
        }
        EnvironmentSpec::RandomContextual { states, actions, horizon, dim_r, context_alpha, shift_episode, phases } => {
            let phases = match (shift_episode, phases) {
                (Some(k), _) => distribution_shift_phases(*dim_r, *k),
                (None, Some(p)) => p.clone(),
                (None, None) => vec![ShiftPhase { start_episode: 1, alpha: vec![*context_alpha; *dim_r] }],
            };
            BuiltInstance::Contextual(ContextualLinearMdp {
                reward_noise: noise,
                ..gen_random_contextual(*states, *actions, *horizon, *dim_r, phases, seed)
            })
        }
        EnvironmentSpec::Bandit { arms, dim_r } => {
            BuiltInstance::Contextual(ContextualLinearMdp { reward_noise: noise, ..gen_bandit(*arms, *dim_r, seed) })
        }
        EnvironmentSpec::File { path } => {
            let path = if path.is_relative() { base.join(path) } else { path.clone() };
            let doc = InstanceDocument::read(&path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
            match doc.instance {
                Instance::Tabular(m) => BuiltInstance::Tabular(m),
                Instance::Contextual(m) => BuiltInstance::Contextual(m),
            }
        }
    };
    Ok(built)
}

/// A contextual instance whose contexts never change, as a tabular MDP.
pub fn constant_context_mdp(env: &ContextualLinearMdp) -> Option<Result<TabularMdp>> {
    match (&env.context_r, &env.context_p) {
        (ContextSampler::Constant { value: xr }, ContextSampler::Constant { value: xp }) => Some(env.realize(xr, xp)),
        _ => None,
    }
}

/// A tabular MDP as a contextual one with constant scalar contexts.
pub fn tabular_as_contextual(m: &TabularMdp) -> ContextualLinearMdp {
    ContextualLinearMdp {
        states: m.states,
        actions: m.actions,
        horizon: m.horizon,
        dim_r: 1,
        dim_p: 1,
        theta_r: m.rewards.iter().map(|row| row.iter().map(|r| vec![*r]).collect()).collect(),
        theta_p: m
            .transitions
            .iter()
            .map(|rows| rows.iter().map(|p| p.iter().map(|x| vec![*x]).collect()).collect())
            .collect(),
        context_r: ContextSampler::Constant { value: vec![1.0] },
        context_p: ContextSampler::Constant { value: vec![1.0] },
        xi_theta_r: 1.0,
        xi_theta_p: 1.0,
        xi_x_r: 1.0,
        xi_x_p: 1.0,
        reward_noise: m.reward_noise,
        initial_state: m.initial_state,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves() {
        for p in super::super::presets::PRESETS {
            let cfg = ExperimentConfig::from_preset(p.name).unwrap();
            assert_eq!(cfg.preset.as_deref(), Some(p.name));
        }
    }

    #[test]
    fn unknown_preset_is_an_error() {
        let err = ExperimentConfig::from_preset("nope").unwrap_err();
        assert!(err.to_string().contains("unknown preset"));
    }

    #[test]
    fn file_overrides_preset_and_flags_override_file() {
        let text = "preset = \"tabular-desk\"\nepisodes = 50\nseeds = [4]\n[algorithm]\nbonus = \"simple\"\n";
        let cfg = ExperimentConfig::resolve(Some(text), &Overrides::default()).unwrap();
        assert_eq!(cfg.episodes, 50);
        assert_eq!(cfg.seeds, vec![4]);
        assert!(matches!(cfg.algorithm, AlgorithmSpec::Orlc { bonus: BonusKind::Simple, delta, .. } if delta == 0.1));
        let cfg = ExperimentConfig::resolve(
            Some(text),
            &Overrides { episodes: Some(7), seeds: Some(vec![1, 2]), ..Default::default() },
        )
        .unwrap();
        assert_eq!((cfg.episodes, cfg.seeds), (7, vec![1, 2]));
    }

    #[test]
    fn changing_the_environment_kind_replaces_it() {
        let text = "preset = \"tabular-desk\"\n[environment]\nkind = \"bandit\"\narms = 3\ndim_r = 1\n";
        let cfg = ExperimentConfig::resolve(Some(text), &Overrides::default()).unwrap();
        assert_eq!(cfg.environment, EnvironmentSpec::Bandit { arms: 3, dim_r: 1 });
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in [
            "preset = \"tabular-desk\"\nepisodes = 0\n",
            "preset = \"tabular-desk\"\nseeds = []\n",
            "preset = \"tabular-desk\"\n[algorithm]\ndelta = 1.5\n",
            "preset = \"tabular-desk\"\nbogus = 1\n",
            "episodes = 10\n",
            "this is not toml",
        ] {
            assert!(ExperimentConfig::resolve(Some(text), &Overrides::default()).is_err(), "{text}");
        }
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ExperimentConfig::from_preset("shift-desk").unwrap();
        let back = ExperimentConfig::resolve(Some(&cfg.to_toml()), &Overrides::default()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn tabular_embedding_realizes_to_the_same_mdp() {
        let m = gen_random_tabular(3, 2, 2, 1);
        let c = tabular_as_contextual(&m);
        assert_eq!(constant_context_mdp(&c).unwrap().unwrap(), m);
    }
}
