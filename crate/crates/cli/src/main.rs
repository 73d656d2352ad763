use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use ucc_synth_cli::exit;
use ucc_synth_cli::manifest::RunManifest;
use ucc_synth_cli::plot::{plot_data, PlotKind};
use ucc_synth_cli::run::{config_dir, run};
use ucc_synth_cli::spec::{parse_spec, ExperimentSpec, Mode, OutputSpec, ProblemKind, RegionSpec};

#[derive(Parser, Debug)]
#[command(name = "ucc-synth", version, about = "Distributed correlation synthesis experiments")]
struct Cli {
    /// Base seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArg {
    /// Experiment spec, or a run manifest to re-run.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact TV of the induced joint over a code sweep.
    Synthesize(ConfigArg),
    /// Change-of-measure soft-covering sweeps.
    SoftCover(ConfigArg),
    /// Covering-overflow and decoder-ambiguity estimates.
    Diagnostics(ConfigArg),
    /// Rate region of an auxiliary PMF or of the binary example.
    RateRegion {
        #[arg(long)]
        config: Option<PathBuf>,
        /// `p q` flip probabilities of the binary example.
        #[arg(long, num_args = 2, value_names = ["P", "Q"])]
        example1: Option<Vec<f64>>,
        /// Auxiliary joint over (Q, W1, W2, X1, X2, Y).
        #[arg(long)]
        aux: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        theta_points: usize,
    },
    /// Structured and unstructured sum-rate minima of the binary example.
    Example1 {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        q: f64,
        #[arg(long, default_value_t = 10_000)]
        theta_points: usize,
    },
    /// Checks a spec and prints problems and cost estimates as JSON.
    Validate(ConfigArg),
    /// Tidy tables for plotting.
    PlotData {
        #[arg(long)]
        input: PathBuf,
        /// tv-vs-n, theta-sweep or threshold-heatmap.
        #[arg(long)]
        kind: String,
        /// Defaults to standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Invalid(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

struct Loaded {
    spec: ExperimentSpec,
    base: PathBuf,
    manifest: Option<RunManifest>,
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    if let Some(m) = RunManifest::detect(&text) {
        return Ok(Loaded {
            spec: m.spec.clone(),
            base: m.config_dir.clone(),
            manifest: Some(m),
        });
    }
    let spec = parse_spec(&text, path).map_err(|e| Failure::Invalid(e.0))?;
    Ok(Loaded {
        spec,
        base: config_dir(path),
        manifest: None,
    })
}

fn execute(mut spec: ExperimentSpec, base: &Path, cli: &Cli, previous: Option<&RunManifest>) -> Result<u8, Failure> {
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    let report = spec.validate(base);
    let fatal: Vec<_> = report.fatal().collect();
    if !fatal.is_empty() {
        for p in &fatal {
            eprintln!("invalid {}: {}", p.field, p.message);
        }
        return Err(Failure::Invalid(format!("{} problem(s) in spec", fatal.len())));
    }
    for p in report.problems.iter().filter(|p| p.kind == ProblemKind::Budget) {
        eprintln!("skipping {}: {}", p.field, p.message);
    }
    let outcome = run(&spec, base, &cli.out)?;
    let base = fs::canonicalize(base).unwrap_or_else(|_| base.to_path_buf());
    let manifest = RunManifest::new(&spec, &base, outcome.seeds.clone(), outcome.outputs.clone());
    let path = manifest.write(&cli.out)?;
    eprintln!("wrote {}", path.display());
    if let Some(prev) = previous {
        if prev.spec_digest == manifest.spec_digest {
            let changed = prev.mismatches(&cli.out);
            if !changed.is_empty() {
                return Err(Failure::Other(anyhow!("re-run differs from manifest in: {}", changed.join(", "))));
            }
            eprintln!("re-run reproduced all deterministic outputs");
        }
    }
    Ok(if outcome.partial { exit::PARTIAL } else { exit::SUCCESS })
}

fn run_config(path: &Path, mode: Mode, cli: &Cli) -> Result<u8, Failure> {
    let loaded = load(path)?;
    if loaded.spec.mode != mode && !(mode == Mode::RateRegion && loaded.spec.mode == Mode::Example1) {
        return Err(Failure::Invalid(format!(
            "{}: spec mode `{}` does not match subcommand `{mode}`",
            path.display(),
            loaded.spec.mode
        )));
    }
    execute(loaded.spec, &loaded.base, cli, loaded.manifest.as_ref())
}

fn region_spec(mode: Mode, region: RegionSpec) -> ExperimentSpec {
    ExperimentSpec {
        mode,
        seed: 0,
        trials: 1,
        source: None,
        codes: vec![],
        delta: 1.5,
        eta: 0.1,
        soft_cover: None,
        region: Some(region),
        outputs: OutputSpec {
            results: "theta_sweep.csv".into(),
            summary: "region.json".into(),
        },
        budget: ucc_synth::prob::DEFAULT_BUDGET,
    }
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Synthesize(c) => run_config(&c.config, Mode::Synthesize, cli),
        Command::SoftCover(c) => run_config(&c.config, Mode::SoftCover, cli),
        Command::Diagnostics(c) => run_config(&c.config, Mode::Diagnostics, cli),
        Command::RateRegion {
            config,
            example1,
            aux,
            theta_points,
        } => {
            if let Some(path) = config {
                return run_config(path, Mode::RateRegion, cli);
            }
            if example1.is_none() && aux.is_none() {
                return Err(Failure::Invalid("rate-region needs --config, --example1 P Q or --aux FILE".into()));
            }
            let region = RegionSpec {
                example1: example1.as_ref().map(|v| [v[0], v[1]]),
                aux: aux.as_ref().map(|p| fs::canonicalize(p).unwrap_or_else(|_| p.clone())),
                theta_points: *theta_points,
            };
            execute(region_spec(Mode::RateRegion, region), Path::new("."), cli, None)
        }
        Command::Example1 {
            config,
            p,
            q,
            theta_points,
        } => {
            if let Some(path) = config {
                return run_config(path, Mode::Example1, cli);
            }
            let region = RegionSpec {
                example1: Some([*p, *q]),
                aux: None,
                theta_points: *theta_points,
            };
            execute(region_spec(Mode::Example1, region), Path::new("."), cli, None)
        }
        Command::Validate(c) => {
            let loaded = load(&c.config)?;
            let report = loaded.spec.validate(&loaded.base);
            println!("{}", serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
            Ok(if report.is_ok() { exit::SUCCESS } else { exit::INVALID })
        }
        Command::PlotData { input, kind, output } => {
            let kind: PlotKind = kind.parse().map_err(|e: anyhow::Error| Failure::Invalid(e.to_string()))?;
            let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
            let table = plot_data(&bytes, kind)?;
            match output {
                Some(path) => fs::write(path, table).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{}", String::from_utf8_lossy(&table)),
            }
            Ok(exit::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(exit::FAILURE);
        }
    }
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(exit::INVALID)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::FAILURE)
        }
    }
}
