//! Command-line front end for the sparse-regret experiment harness.
//!
//! Exit status: 0 when every checked bound holds, 2 when a run completed but
//! violated its bound, 1 on usage or runtime errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use sparse_regret::bandit::BanditEtaRule;
use sparse_regret::bounds::gains_setting;
use sparse_regret::{
    bound_table, compare_to_bound, export, run_experiment, AdversaryKind, Algorithm, BoundSetting,
    ExperimentConfig, ExportFormat, RunResult,
};

const THREADS_VAR: &str = "SPARSE_REGRET_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "sparse-regret",
    version,
    about = "Regret experiments with sparse gains and losses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment (or a sweep) and check it against its bound.
    Run(RunArgs),
    /// Print the upper/lower bound summary at (d, s, T).
    Bounds(BoundsArgs),
    /// Run the built-in bound-verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// JSON experiment file; replaces the experiment flags below.
    #[arg(long, conflicts_with_all = ["algo", "adversary", "d", "s", "horizon", "reps", "seed", "stride", "epsilon", "levels", "q", "eta_rule", "bound"])]
    config: Option<PathBuf>,

    #[arg(long, value_enum, required_unless_present = "config")]
    algo: Option<AlgoArg>,
    #[arg(long, value_enum, required_unless_present = "config")]
    adversary: Option<AdversaryArg>,
    /// Number of arms.
    #[arg(long, required_unless_present = "config")]
    d: Option<usize>,
    /// Sparsity (for the ramp adversary, the largest support size).
    #[arg(long, required_unless_present = "config")]
    s: Option<usize>,
    /// Horizon.
    #[arg(
        long = "T",
        id = "horizon",
        value_name = "T",
        required_unless_present = "config"
    )]
    horizon: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory stride; defaults to T/100.
    #[arg(long)]
    stride: Option<usize>,
    /// Bias of the hidden arm of the bandit lower-bound adversary.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Support sizes of the ramp adversary, comma separated.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    /// Fixed Tsallis exponent for bandit-tsallis.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, value_enum)]
    eta_rule: Option<EtaRuleArg>,
    /// Bound to check instead of the algorithm's own, e.g. full-info-gains-small.
    #[arg(long, value_parser = parse_bound_setting)]
    bound: Option<BoundSetting>,

    /// Output file for the result.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; inferred from the --out extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    s: usize,
    #[arg(long = "T", value_name = "T")]
    horizon: usize,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run only the named presets.
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<String>>,
    /// List the presets and exit.
    #[arg(long)]
    list: bool,
    /// Directory to write one JSON result per preset into.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    OmdGains,
    EwaLosses,
    AdaptiveLosses,
    AdaptiveGains,
    BanditTsallis,
    #[value(alias = "uniform")]
    UniformRandom,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::OmdGains => Algorithm::OmdGains,
            AlgoArg::EwaLosses => Algorithm::EwaLosses,
            AlgoArg::AdaptiveLosses => Algorithm::AdaptiveLosses,
            AlgoArg::AdaptiveGains => Algorithm::AdaptiveGains,
            AlgoArg::BanditTsallis => Algorithm::BanditTsallis,
            AlgoArg::UniformRandom => Algorithm::UniformRandom,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AdversaryArg {
    RandomSparse,
    #[value(alias = "first-s-gains")]
    FirstSCoordsGains,
    #[value(alias = "full-info-lb")]
    FullInfoLossLb,
    #[value(alias = "bandit-lb")]
    BanditLossLb,
    #[value(alias = "ramp")]
    SparsityRamp,
}

impl From<AdversaryArg> for AdversaryKind {
    fn from(a: AdversaryArg) -> Self {
        match a {
            AdversaryArg::RandomSparse => AdversaryKind::RandomSparse,
            AdversaryArg::FirstSCoordsGains => AdversaryKind::FirstSCoordsGains,
            AdversaryArg::FullInfoLossLb => AdversaryKind::FullInfoLossLb,
            AdversaryArg::BanditLossLb => AdversaryKind::BanditLossLb,
            AdversaryArg::SparsityRamp => AdversaryKind::SparsityRamp,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EtaRuleArg {
    Balanced,
    Reciprocal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Lists of values swept as a cartesian product over the base experiment.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sweep {
    #[serde(default)]
    dim: Vec<usize>,
    #[serde(default)]
    s: Vec<usize>,
    #[serde(default)]
    horizon: Vec<usize>,
}

impl Sweep {
    fn expand(&self, base: &ExperimentConfig) -> Vec<ExperimentConfig> {
        let or_base = |values: &[usize], v: usize| {
            if values.is_empty() {
                vec![v]
            } else {
                values.to_vec()
            }
        };
        let mut out = Vec::new();
        for &dim in &or_base(&self.dim, base.dim) {
            for &s in &or_base(&self.s, base.s) {
                for &horizon in &or_base(&self.horizon, base.horizon) {
                    out.push(ExperimentConfig {
                        dim,
                        s,
                        horizon,
                        ..base.clone()
                    });
                }
            }
        }
        out
    }
}

/// Reads an experiment file: an experiment configuration plus an optional
/// `sweep` object. Unknown keys are rejected.
fn load_config_file(path: &Path) -> anyhow::Result<Vec<ExperimentConfig>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut doc: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let sweep = match doc.as_object_mut().and_then(|o| o.remove("sweep")) {
        Some(v) => serde_json::from_value::<Sweep>(v)
            .with_context(|| format!("invalid sweep in {}", path.display()))?,
        None => Sweep::default(),
    };
    let base: ExperimentConfig = serde_json::from_value(doc)
        .with_context(|| format!("invalid experiment in {}", path.display()))?;
    Ok(sweep.expand(&base))
}

fn parse_bound_setting(raw: &str) -> Result<BoundSetting, String> {
    serde_json::from_value(serde_json::Value::String(raw.to_owned())).map_err(|_| {
        "expected one of full-info-gains, full-info-gains-small, full-info-losses, \
         adaptive-losses, adaptive-gains, bandit-losses, bandit-losses-lower"
            .to_owned()
    })
}

fn config_from_flags(args: &RunArgs) -> ExperimentConfig {
    // clap guarantees presence when --config is absent.
    let mut config = ExperimentConfig::new(
        args.algo.expect("required").into(),
        args.adversary.expect("required").into(),
        args.d.expect("required"),
        args.s.expect("required"),
        args.horizon.expect("required"),
    );
    config.replications = args.reps.unwrap_or(1);
    config.base_seed = args.seed.unwrap_or(0);
    config.record_trajectory_every = args.stride;
    config.epsilon = args.epsilon;
    config.levels = args.levels.clone();
    config.bandit.q = args.q;
    config.bound = args.bound;
    if let Some(rule) = args.eta_rule {
        config.bandit.eta_rule = match rule {
            EtaRuleArg::Balanced => BanditEtaRule::Balanced,
            EtaRuleArg::Reciprocal => BanditEtaRule::Reciprocal,
        };
    }
    config
}

fn output_format(args: &RunArgs, path: &Path) -> ExportFormat {
    match args.format {
        Some(FormatArg::Csv) => ExportFormat::Csv,
        Some(FormatArg::Json) => ExportFormat::Json,
        None if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json")) =>
        {
            ExportFormat::Json
        }
        None => ExportFormat::Csv,
    }
}

/// `out.csv` becomes `out_d50_s5_T20000.csv` when a sweep writes several files.
fn sweep_path(base: &Path, config: &ExperimentConfig) -> PathBuf {
    let stem = base
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("result");
    let mut name = format!("{stem}_d{}_s{}_T{}", config.dim, config.s, config.horizon);
    if let Some(ext) = base.extension().and_then(|e| e.to_str()) {
        name.push('.');
        name.push_str(ext);
    }
    base.with_file_name(name)
}

fn describe(config: &ExperimentConfig) -> String {
    format!(
        "{} vs {} (d = {}, s = {}, T = {}, {} replications, seed {})",
        config.algorithm,
        serde_json::to_value(config.adversary)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default(),
        config.dim,
        config.s,
        config.horizon,
        config.replications,
        config.base_seed
    )
}

/// Prints the summary of one run and returns whether its bound held.
fn report(result: &RunResult) -> anyhow::Result<bool> {
    println!("{}", describe(&result.config));
    let s = &result.summary;
    println!(
        "  pseudo-regret: mean {:.4} ± {:.4} (stderr {:.4}, min {:.4}, max {:.4})",
        s.mean, s.std, s.stderr, s.min, s.max
    );
    if let Some(r) = &result.realized_summary {
        println!("  realized regret: mean {:.4} ± {:.4}", r.mean, r.std);
    }
    if result.bound.is_none() {
        println!("  no bound applies to this configuration");
        return Ok(true);
    }
    let report = compare_to_bound(result)?;
    println!("  {report}");
    Ok(report.pass)
}

fn command_run(args: &RunArgs) -> anyhow::Result<bool> {
    let configs = match &args.config {
        Some(path) => load_config_file(path)?,
        None => vec![config_from_flags(args)],
    };
    let mut all_pass = true;
    for config in &configs {
        let result = run_experiment(config).with_context(|| describe(config))?;
        all_pass &= report(&result)?;
        if let Some(out) = &args.out {
            let path = if configs.len() > 1 {
                sweep_path(out, config)
            } else {
                out.clone()
            };
            export(&result, output_format(args, &path), &path)?;
            println!("  wrote {}", path.display());
        }
    }
    Ok(all_pass)
}

fn command_bounds(args: &BoundsArgs) -> anyhow::Result<()> {
    let table = bound_table(args.d, args.s, args.horizon)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&table)?);
        return Ok(());
    }
    let gains_formula = match gains_setting(args.s) {
        BoundSetting::FullInfoGains => "sqrt(2 e T ln s)",
        _ => "sqrt(s T)",
    };
    let cell = |v: Option<f64>, why: &str| match v {
        Some(v) => format!("{v:.4}"),
        None => format!("undefined ({why})"),
    };
    println!("d = {}, s = {}, T = {}", args.d, args.s, args.horizon);
    println!(
        "full-info gains       {:.4}  {gains_formula}",
        table.full_info_gains
    );
    println!(
        "full-info losses      {}  sqrt(2 s T ln d / d) + ln d",
        cell(table.full_info_losses, "requires d >= 2")
    );
    println!(
        "bandit losses upper   {}  2 sqrt(e) sqrt(T s ln(d/s))",
        cell(table.bandit_losses_upper, "requires d/s >= e^2")
    );
    println!(
        "bandit losses lower   {}  sqrt(T s) / 32",
        cell(
            table.bandit_losses_lower,
            "requires d >= 2 and T >= d^2/(4s)"
        )
    );
    Ok(())
}

fn presets() -> Vec<(&'static str, ExperimentConfig)> {
    let ramp = |algo| {
        ExperimentConfig::new(algo, AdversaryKind::SparsityRamp, 50, 8, 20_000)
            .levels(vec![1, 2, 5, 8])
            .replications(32)
            .seed(7)
    };
    let lb = |algo| {
        ExperimentConfig::new(algo, AdversaryKind::BanditLossLb, 8, 2, 10_000)
            .epsilon(sparse_regret::adversaries::default_epsilon(2, 10_000))
            .replications(200)
            .seed(7)
    };
    vec![
        (
            "full-info-gains",
            ExperimentConfig::new(
                Algorithm::OmdGains,
                AdversaryKind::RandomSparse,
                100,
                4,
                10_000,
            )
            .replications(32)
            .seed(7),
        ),
        (
            "full-info-losses",
            ExperimentConfig::new(
                Algorithm::EwaLosses,
                AdversaryKind::RandomSparse,
                50,
                5,
                20_000,
            )
            .replications(32)
            .seed(7),
        ),
        ("adaptive-losses", ramp(Algorithm::AdaptiveLosses)),
        ("adaptive-gains", ramp(Algorithm::AdaptiveGains)),
        (
            "bandit-upper",
            ExperimentConfig::new(
                Algorithm::BanditTsallis,
                AdversaryKind::RandomSparse,
                64,
                4,
                40_000,
            )
            .replications(32)
            .seed(7),
        ),
        // d/s = 4 < e² here, so the bandit learner runs with q = 2.
        (
            "bandit-lower-tsallis",
            lb(Algorithm::BanditTsallis).bandit_q(2.0),
        ),
        ("bandit-lower-uniform", lb(Algorithm::UniformRandom)),
    ]
}

fn command_verify(args: &VerifyArgs) -> anyhow::Result<bool> {
    let all = presets();
    if args.list {
        for (name, config) in &all {
            println!("{name:<22} {}", describe(config));
        }
        return Ok(true);
    }
    if let Some(only) = &args.only {
        for name in only {
            if !all.iter().any(|(n, _)| n == name) {
                bail!("unknown preset {name:?}; see `verify --list`");
            }
        }
    }
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut all_pass = true;
    for (name, config) in all {
        if args
            .only
            .as_ref()
            .is_some_and(|o| !o.iter().any(|n| n == name))
        {
            continue;
        }
        println!("[{name}]");
        let result = run_experiment(&config).with_context(|| name.to_string())?;
        all_pass &= report(&result)?;
        if let Some(dir) = &args.out_dir {
            export(
                &result,
                ExportFormat::Json,
                &dir.join(format!("{name}.json")),
            )?;
        }
    }
    println!(
        "{}",
        if all_pass {
            "all bounds hold"
        } else {
            "bound violated"
        }
    );
    Ok(all_pass)
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the thread pool")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = configure_threads().and_then(|()| match &cli.command {
        Command::Run(args) => command_run(args),
        Command::Bounds(args) => command_bounds(args).map(|()| true),
        Command::Verify(args) => command_verify(args),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
