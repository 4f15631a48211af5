use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mccm::synth::ErrorTrialConfig;
use mccm_cli::commands::{
    gen_clusters, gen_figure1, parse_resize, run_benchmark, run_classify, run_descriptor, run_synthetic,
    ClusterOptions, DescriptorOptions, GeneratedSplit, Recipe,
};
use mccm_cli::dataset::{save_records, write_records};
use mccm_cli::{CliError, Method, Result, RunConfig};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "mccm", version, about = "Classify SPD matrices with convex class models")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// JSON run configuration; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Descriptor ridge (default 1e-6·trace/k).
    #[arg(long, global = true)]
    ridge: Option<f64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (a directory for `gen`); stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include the optimal simplex weights in classification reports.
    #[arg(long, global = true)]
    weights: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every matrix of a test set against class models built from a training set.
    Classify {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, value_enum)]
        variant: Option<Method>,
    },
    /// Time several classifiers on the same train/test split.
    Benchmark {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "fm,cs,le,geo-nn,euclid-hull")]
        variants: Vec<Method>,
    },
    /// Approximation-error study on synthetic equidistant triples.
    Synthetic {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        multipliers: Option<Vec<f64>>,
        #[arg(long)]
        condition_cap: Option<f64>,
        #[arg(long)]
        tangent_norm: Option<f64>,
    },
    /// Build covariance descriptors from grid or table files.
    Descriptor {
        #[arg(long)]
        recipe: String,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        label: Option<String>,
        #[arg(long, default_value_t = 16)]
        dct_k: usize,
        /// Resample grids to ROWSxCOLS first.
        #[arg(long)]
        resize: Option<String>,
        #[arg(long)]
        subtract_mean_frame: bool,
        #[arg(long)]
        unit_variance: bool,
    },
    /// Write a synthetic train.jsonl/test.jsonl pair into the --out directory.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Well separated Gaussian-like classes.
    Clusters {
        #[arg(long, default_value_t = 3)]
        classes: usize,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        train_per_class: usize,
        #[arg(long, default_value_t = 5)]
        test_per_class: usize,
        #[arg(long, default_value_t = 3.0)]
        separation: f64,
        #[arg(long, default_value_t = 0.5)]
        spread: f64,
    },
    /// Two classes where the nearest neighbour and the convex model disagree.
    Figure1 {
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
}

fn run_config(g: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if g.seed.is_some() {
        cfg.seed = g.seed;
    }
    if g.ridge.is_some() {
        cfg.ridge = g.ridge;
    }
    if let Some(t) = g.threads {
        cfg.threads = t;
    }
    cfg.weights |= g.weights;
    cfg.validate()?;
    Ok(cfg)
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    match out {
        Some(p) => fs::write(p, text + "\n").map_err(|e| CliError::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn write_split(split: &GeneratedSplit, dir: Option<&Path>) -> Result<()> {
    let dir = dir.ok_or_else(|| CliError::Usage("gen needs --out <DIR>".into()))?;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    save_records(&dir.join("train.jsonl"), &split.train)?;
    save_records(&dir.join("test.jsonl"), &split.test)
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = run_config(&cli.global)?;
    let out = cli.global.out.as_deref();
    match cli.command {
        Command::Classify { train, test, variant } => {
            if let Some(v) = variant {
                cfg.variant = v;
            }
            emit_json(&run_classify(&train, &test, &cfg)?, out)
        }
        Command::Benchmark { train, test, variants } => emit_json(&run_benchmark(&train, &test, &variants, &cfg)?, out),
        Command::Synthetic {
            dim,
            trials,
            multipliers,
            condition_cap,
            tangent_norm,
        } => {
            let d = ErrorTrialConfig::default();
            let study = ErrorTrialConfig {
                dim: dim.unwrap_or(d.dim),
                trials: trials.unwrap_or(d.trials),
                multipliers: multipliers.unwrap_or(d.multipliers),
                seed: cfg.seed.unwrap_or(d.seed),
                condition_cap: condition_cap.unwrap_or(d.condition_cap),
                tangent_norm: tangent_norm.unwrap_or(d.tangent_norm),
            };
            emit_json(&run_synthetic(&study, &cfg)?.0, out)
        }
        Command::Descriptor {
            recipe,
            inputs,
            label,
            dct_k,
            resize,
            subtract_mean_frame,
            unit_variance,
        } => {
            let opts = DescriptorOptions {
                label,
                ridge: cfg.ridge,
                dct_k,
                resize: resize.as_deref().map(parse_resize).transpose()?,
                subtract_mean_frame,
                unit_variance,
                ..DescriptorOptions::new(Recipe::parse(&recipe)?, inputs)
            };
            let records = run_descriptor(&opts)?;
            match out {
                Some(p) => save_records(p, &records),
                None => write_records(std::io::stdout().lock(), &records).map_err(|e| CliError::io("<stdout>", e)),
            }
        }
        Command::Gen { kind } => {
            let seed = cfg.seed.unwrap_or(0);
            let split = match kind {
                GenKind::Clusters {
                    classes,
                    dim,
                    train_per_class,
                    test_per_class,
                    separation,
                    spread,
                } => gen_clusters(&ClusterOptions {
                    classes,
                    dim,
                    train_per_class,
                    test_per_class,
                    separation,
                    spread,
                    seed,
                })?,
                GenKind::Figure1 { dim } => gen_figure1(dim, seed)?,
            };
            write_split(&split, out)
        }
    }
}

fn fail(e: &CliError) -> ExitCode {
    let _ = writeln!(std::io::stderr(), "{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.to_string())),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
