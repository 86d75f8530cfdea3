//! Command-line front end. Exit status 0 on success, 1 on usage errors, 2 on
//! runtime errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use sparsenet_core::data::{synthesize_morse, Dataset, MorseGenSpec};
use sparsenet_core::net::{gradient_check, train, Optimizer, SparseNet, TrainConfig, TrainReport};
use sparsenet_core::topology::{generate_random_pattern, generate_windowed_pattern, ConnectionPattern, Locality, NetworkTopology};

use crate::checkpoint::{config_digest, write_checkpoint, CheckpointMeta};
use crate::dataset_io::{load_idx_images, read_dataset_csv, write_dataset_csv};
use crate::pattern_io::{pattern_to_string, read_pattern};
use crate::plot::{line_chart, series_from_csv};
use crate::report::scatter_report;
use crate::sweep::{run_sweep, runs_dir_for, spearman, write_outcome, ExperimentKind, SweepSpec, WallClock};
use crate::textfile::{parse_list, write_text};

#[derive(Debug, Parser)]
#[command(name = "sparsenet", version, about = "Pre-defined sparse networks: patterns, scatter, training and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Generate a connection pattern file.
    Generate(GenerateArgs),
    /// Report the scatter vector of a pattern file as CSV.
    Scatter(ScatterArgs),
    /// Train a network on a pattern and dataset.
    Train(TrainArgs),
    /// Run a sweep described by a spec file.
    Sweep(SweepArgs),
    /// Write a synthesized Morse dataset as CSV.
    MorseGen(MorseGenArgs),
    /// Compare analytic and finite-difference gradients.
    Gradcheck(GradcheckArgs),
    /// Draw an SVG line chart from CSV columns.
    Plot(PlotArgs),
}

/// Comma-separated sizes, e.g. `64,1024,64`.
#[derive(Debug, Clone)]
struct Sizes(Vec<usize>);

impl std::str::FromStr for Sizes {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_list(s).map(Sizes)
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Layer sizes, e.g. 64,1024,64.
    #[arg(long)]
    layers: Sizes,
    /// One fan-out per junction, e.g. 128,8.
    #[arg(long)]
    fan_outs: Sizes,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Windowed pattern, one locality per junction: `full` or `forward:backward`.
    #[arg(long)]
    locality: Option<String>,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScatterArgs {
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DatasetArgs {
    /// morse, idx or csv.
    #[arg(long, default_value = "morse")]
    dataset: String,
    #[arg(long)]
    images: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// CSV dataset file (for --dataset csv).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Number of classes; defaults to the network's output size.
    #[arg(long)]
    classes: Option<usize>,
    /// Zero-pad square images to this side length.
    #[arg(long)]
    pad_to: Option<usize>,
    #[command(flatten)]
    morse: MorseArgs,
}

#[derive(Debug, Args)]
struct MorseArgs {
    #[arg(long, default_value_t = MorseGenSpec::default().samples_per_class)]
    samples_per_class: usize,
    #[arg(long, default_value_t = MorseGenSpec::default().noise_sigma)]
    noise: f64,
    #[arg(long, default_value_t = MorseGenSpec::default().max_shift)]
    max_shift: usize,
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
}

impl MorseArgs {
    fn spec(&self) -> MorseGenSpec {
        MorseGenSpec { samples_per_class: self.samples_per_class, noise_sigma: self.noise, max_shift: self.max_shift, seed: self.data_seed }
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    pattern: PathBuf,
    #[command(flatten)]
    data: DatasetArgs,
    /// sgd or adam; defaults to sgd for Morse and adam otherwise.
    #[arg(long)]
    optimizer: Option<Optimizer>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long, default_value_t = 0.2)]
    validation_fraction: f64,
    /// Seeds the split and the shuffling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    init_seed: u64,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Per-epoch CSV report; stdout if absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Output CSV; overrides the spec's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Save every run's pattern and checkpoint next to the CSV.
    #[arg(long)]
    save_runs: bool,
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args)]
struct MorseGenArgs {
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    morse: MorseArgs,
}

#[derive(Debug, Args)]
struct GradcheckArgs {
    #[arg(long, default_value = "6,8,4")]
    layers: Sizes,
    /// Defaults to a fully connected network.
    #[arg(long)]
    fan_outs: Option<Sizes>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    samples: usize,
    #[arg(long, default_value_t = 1e-5)]
    tolerance: f64,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// Column whose values split rows into series.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => write_text(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn generate(args: &GenerateArgs) -> anyhow::Result<()> {
    let topology = NetworkTopology::new(&args.layers.0, &args.fan_outs.0)?;
    let pattern = match &args.locality {
        None => generate_random_pattern(&topology, args.seed)?,
        Some(text) => {
            let locs = text.split_whitespace().map(str::parse).collect::<Result<Vec<Locality>, _>>()?;
            generate_windowed_pattern(&topology, &locs, args.seed)?
        }
    };
    emit(args.out.as_deref(), &pattern_to_string(&pattern))
}

fn scatter(args: &ScatterArgs) -> anyhow::Result<()> {
    let pattern = read_pattern(&args.pattern)?;
    let name = args.pattern.file_stem().map_or_else(|| "pattern".into(), |s| s.to_string_lossy().into_owned());
    emit(args.out.as_deref(), &scatter_report(&name, &pattern)?)
}

fn load_dataset(args: &DatasetArgs, classes: usize) -> anyhow::Result<Dataset> {
    let mut data = match args.dataset.as_str() {
        "morse" => synthesize_morse(&args.morse.spec())?,
        "idx" => {
            let (Some(images), Some(labels)) = (&args.images, &args.labels) else { bail!("--dataset idx needs --images and --labels") };
            load_idx_images(images, labels)?
        }
        "csv" => {
            let Some(path) = &args.csv else { bail!("--dataset csv needs --csv") };
            read_dataset_csv(path, args.classes.unwrap_or(classes))?
        }
        other => bail!("unknown dataset {other:?}"),
    };
    if let Some(side) = args.pad_to {
        let old = (data.dim() as f64).sqrt().round() as usize;
        data = data.pad_square(old, side)?;
    }
    let want = args.classes.unwrap_or(classes);
    if want > data.class_count() {
        data = data.with_class_count(want)?;
    }
    Ok(data)
}

pub fn report_to_csv(report: &TrainReport) -> String {
    let mut out = String::from("epoch,train_loss,validation_accuracy\n");
    for (k, (loss, acc)) in report.train_loss.iter().zip(&report.validation_accuracy).enumerate() {
        writeln!(out, "{},{loss:.6},{acc:.4}", k + 1).unwrap();
    }
    out
}

fn train_command(args: &TrainArgs) -> anyhow::Result<()> {
    let pattern: ConnectionPattern = read_pattern(&args.pattern)?;
    let data = load_dataset(&args.data, pattern.topology().output_size())?;
    let base = if args.data.dataset == "morse" { TrainConfig::morse() } else { TrainConfig::mnist() };
    let config = TrainConfig {
        optimizer: args.optimizer.unwrap_or(base.optimizer),
        learning_rate: args.lr.unwrap_or(base.learning_rate),
        epochs: args.epochs.unwrap_or(base.epochs),
        batch_size: args.batch.unwrap_or(base.batch_size),
        l2_coefficient: args.l2.unwrap_or(base.l2_coefficient),
        validation_fraction: args.validation_fraction,
        seed: args.seed,
        ..base
    };
    let net = SparseNet::init(pattern, args.init_seed);
    let (net, report) = train(net, &data, &config, &WallClock::start())?;
    if let Some(path) = &args.checkpoint {
        let meta = CheckpointMeta { init_seed: Some(args.init_seed), config_digest: Some(config_digest(&config)) };
        write_checkpoint(&net, &meta, path)?;
    }
    emit(args.report.as_deref(), &report_to_csv(&report))?;
    eprintln!("best validation accuracy {:.4} in {:.1}s", report.best_validation_accuracy, report.wall_seconds);
    Ok(())
}

fn sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let spec = SweepSpec::from_file(&args.spec)?;
    let Some(out) = args.out.clone().or_else(|| spec.output.clone()) else { bail!("no output path: pass --out or set output in the spec") };
    let runs_dir = (args.save_runs || spec.save_runs).then(|| runs_dir_for(&out));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build()?;
    let outcome = pool.install(|| run_sweep(&spec, runs_dir.as_deref()))?;
    write_outcome(&outcome, &out)?;
    if spec.kind == ExperimentKind::ScatterStudy {
        if let Some(rho) = spearman(&outcome.rows) {
            eprintln!("spearman(scatter order, accuracy) = {rho:.4}");
        }
    }
    eprintln!("{} rows written to {}", outcome.rows.len(), out.display());
    Ok(())
}

fn morse_gen(args: &MorseGenArgs) -> anyhow::Result<()> {
    let data = synthesize_morse(&args.morse.spec())?;
    write_dataset_csv(&data, &args.out)?;
    Ok(())
}

fn gradcheck(args: &GradcheckArgs) -> anyhow::Result<()> {
    let pattern = match &args.fan_outs {
        Some(fos) => generate_random_pattern(&NetworkTopology::new(&args.layers.0, &fos.0)?, args.seed)?,
        None => ConnectionPattern::dense(&args.layers.0)?,
    };
    let net = SparseNet::init(pattern, args.seed);
    let report = gradient_check(&net, args.samples, args.tolerance, args.seed)?;
    println!("parameters={} max_rel_error={:.3e} worst_index={} pass={}", report.parameters, report.max_rel_error, report.worst_index, report.pass);
    if !report.pass {
        bail!("gradient check failed: {:.3e} > {:.3e}", report.max_rel_error, args.tolerance);
    }
    Ok(())
}

fn plot(args: &PlotArgs) -> anyhow::Result<()> {
    let series = series_from_csv(&args.csv, &args.x, &args.y, args.group.as_deref())?;
    write_text(&args.out, &line_chart(&series, &args.x, &args.y)).with_context(|| "writing chart")?;
    Ok(())
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Scatter(a) => scatter(a),
        Command::Train(a) => train_command(a),
        Command::Sweep(a) => sweep(a),
        Command::MorseGen(a) => morse_gen(a),
        Command::Gradcheck(a) => gradcheck(a),
        Command::Plot(a) => plot(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}
