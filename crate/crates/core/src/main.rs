use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use orlc::experiment::{
    export_csv, run_experiment, summarize, ExperimentConfig, ExperimentError, Fault, Overrides, PRESETS,
};

/// Run and audit ORLC / ORLC-SI experiments.
///
/// Config precedence, highest first: command-line flags, the config file,
/// the preset it names, built-in defaults. The output directory falls back
/// to $ORLC_OUTPUT_DIR and then ./orlc-out.
#[derive(Parser)]
#[command(name = "orlc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of an experiment, write records and reports, print a summary.
    Run(RunArgs),
    /// Aggregate report files across seeds.
    Summarize {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Also write the summary as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Convert a JSONL record file to CSV.
    ExportCsv {
        records: PathBuf,
        /// Defaults to the input path with a .csv extension.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Resolve a config and print it, or report why it is invalid.
    ValidateConfig(ConfigArgs),
    /// List the built-in presets.
    ListPresets,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML experiment config.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(short, long)]
    preset: Option<String>,
    #[arg(long)]
    episodes: Option<u64>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long)]
    stride: Option<u64>,
    /// Corrupt the announced certificates (audit self-check).
    #[arg(long, value_enum)]
    fault: Option<FaultArg>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Worker threads for running seeds in parallel.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    ZeroCertificate,
}

const EXIT_VIOLATION: u8 = 1;

fn load(args: &ConfigArgs) -> Result<(ExperimentConfig, PathBuf), ExperimentError> {
    if args.config.is_none() && args.preset.is_none() {
        return Err(ExperimentError::Config("give --config or --preset".into()));
    }
    let (text, base) = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| ExperimentError::Io { path: p.clone(), source })?;
            let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
            (Some(text), base)
        }
        None => (None, PathBuf::from(".")),
    };
    let overrides = Overrides {
        preset: args.preset.clone(),
        episodes: args.episodes,
        seeds: args.seeds.clone(),
        output_dir: args.out.clone(),
        stride: args.stride,
        fault: args.fault.map(|FaultArg::ZeroCertificate| Fault::ZeroCertificate),
    };
    let cfg = ExperimentConfig::resolve(text.as_deref(), &overrides).map_err(|e| ExperimentError::Config(e.to_string()))?;
    Ok((cfg, base))
}

fn run(args: RunArgs) -> Result<u8, ExperimentError> {
    let (cfg, base) = load(&args.config)?;
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
    }
    let runs = run_experiment(&cfg, &base)?;
    println!(
        "{:>6}  {:>9}  {:>10}  {:>12}  {:>12}  {:>8}  {:>10}",
        "seed", "episodes", "violations", "sum eps", "regret", "corr", "final eps"
    );
    for r in &runs {
        let m = &r.report.metrics;
        println!(
            "{:>6}  {:>9}  {:>10}  {:>12.3}  {:>12.3}  {:>8.4}  {:>10.4}",
            r.seed,
            m.episodes,
            m.validity_violations,
            m.cumulative_certificates,
            m.regret,
            m.pearson_correlation.value,
            m.final_epsilon
        );
    }
    println!("output: {}", cfg.output_dir().display());
    let violations: u64 = runs.iter().map(|r| r.report.metrics.validity_violations).sum();
    if violations > 0 {
        eprintln!("{violations} certificate validity violations");
        Ok(EXIT_VIOLATION)
    } else {
        Ok(0)
    }
}

fn dispatch(cli: Cli) -> Result<u8, ExperimentError> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Summarize { reports, json } => {
            let s = summarize(&reports)?;
            print!("{}", s.to_table());
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&s).expect("summary serializes");
                std::fs::write(&path, text + "\n").map_err(|source| ExperimentError::Io { path, source })?;
            }
            Ok(0)
        }
        Command::ExportCsv { records, output } => {
            let out = output.unwrap_or_else(|| records.with_extension("csv"));
            let n = export_csv(&records, &out)?;
            println!("wrote {n} rows to {}", out.display());
            Ok(0)
        }
        Command::ValidateConfig(args) => {
            let (cfg, _) = load(&args)?;
            print!("{}", cfg.to_toml());
            Ok(0)
        }
        Command::ListPresets => {
            for p in PRESETS {
                println!("{:<16} {}", p.name, p.summary);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
