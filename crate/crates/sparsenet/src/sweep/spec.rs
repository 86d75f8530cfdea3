//! SweepSpec files: `key = value` lines, `#` comments.
//!
//! `fan_outs`, `network`, `density` and `pattern` may repeat; every other key
//! appears at most once. Relative paths resolve against the spec file's
//! directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sparsenet_core::data::{split, synthesize_morse, Dataset, MorseGenSpec};
use sparsenet_core::net::{Optimizer, TrainConfig};
use sparsenet_core::rng::derive_seed;
use sparsenet_core::topology::Locality;

use crate::dataset_io::{load_idx_images, read_dataset_csv};
use crate::error::{Error, Result};
use crate::textfile::{parse_list, read_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    DensitySweep,
    JunctionDistribution,
    ScatterStudy,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::DensitySweep => "density_sweep",
            ExperimentKind::JunctionDistribution => "junction_distribution",
            ExperimentKind::ScatterStudy => "scatter_study",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "density_sweep" => Ok(ExperimentKind::DensitySweep),
            "junction_distribution" => Ok(ExperimentKind::JunctionDistribution),
            "scatter_study" => Ok(ExperimentKind::ScatterStudy),
            _ => Err(format!("unknown experiment kind {s:?}")),
        }
    }
}

/// Exact non-negative fraction, written `p/q` or as a decimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Ratio {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("bad fraction {s:?}");
        let (num, den) = if let Some((p, q)) = s.split_once('/') {
            (p.trim().parse::<u128>().map_err(|_| bad())?, q.trim().parse::<u128>().map_err(|_| bad())?)
        } else {
            let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
            if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let whole: u128 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
            let den = 10u128.pow(frac.len() as u32);
            let frac: u128 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            (whole * den + frac, den)
        };
        if den == 0 {
            return Err(bad());
        }
        Ok(Ratio { num, den })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternChoice {
    Random,
    Windowed(Vec<Locality>),
}

impl fmt::Display for PatternChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternChoice::Random => f.write_str("random"),
            PatternChoice::Windowed(locs) => {
                let parts: Vec<String> = locs.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join(" "))
            }
        }
    }
}

impl FromStr for PatternChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "random" {
            return Ok(PatternChoice::Random);
        }
        s.split_whitespace()
            .map(|p| p.parse::<Locality>().map_err(|e| format!("bad locality {p:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(PatternChoice::Windowed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Morse(MorseGenSpec),
    Idx { images: PathBuf, labels: PathBuf, pad_to: Option<usize>, classes: Option<usize>, limit: Option<usize> },
    Csv { path: PathBuf, classes: usize },
}

impl DatasetSource {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DatasetSource::Morse(spec) => Ok(synthesize_morse(spec)?),
            DatasetSource::Idx { images, labels, pad_to, classes, limit } => {
                let mut data = load_idx_images(images, labels)?;
                if let Some(limit) = limit.filter(|&l| l < data.len()) {
                    data = data.subset(&(0..limit).collect::<Vec<_>>());
                }
                if let Some(side) = pad_to {
                    let old = (data.dim() as f64).sqrt().round() as usize;
                    data = data.pad_square(old, *side)?;
                }
                if let Some(classes) = classes {
                    data = data.with_class_count(*classes)?;
                }
                Ok(data)
            }
            DatasetSource::Csv { path, classes } => read_dataset_csv(path, *classes),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub id: String,
    pub kind: ExperimentKind,
    pub layers: Vec<usize>,
    pub fan_outs: Vec<Vec<usize>>,
    /// Per-point topologies, `layers / fan_outs`.
    pub networks: Vec<(Vec<usize>, Vec<usize>)>,
    pub densities: Vec<Ratio>,
    pub overall_density: Option<Ratio>,
    /// Evenly spaced subset of the feasible frontier; `None` keeps all of it.
    pub frontier_points: Option<usize>,
    pub patterns: Vec<PatternChoice>,
    pub repeats: usize,
    pub seed: u64,
    /// Template; each run replaces `train.seed` with its own.
    pub train: TrainConfig,
    pub dataset: DatasetSource,
    pub output: Option<PathBuf>,
    /// Also write each run's pattern file and checkpoint.
    pub save_runs: bool,
}

impl SweepSpec {
    pub fn from_file(path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&read_text(path)?, path, base)
    }

    pub fn parse(text: &str, path: &Path, base: &Path) -> Result<Self> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::parse(path, k + 1, "expected key = value"))?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::parse(path, k + 1, format!("unknown key {key}")));
            }
            if !REPEATABLE.contains(&key.as_str()) && entries.iter().any(|(_, k2, _)| *k2 == key) {
                return Err(Error::parse(path, k + 1, format!("duplicate key {key}")));
            }
            entries.push((k + 1, key, value.trim().to_string()));
        }
        let reader = SpecReader { path, entries: &entries };

        let kind: ExperimentKind = reader.required("kind")?;
        let dataset_kind: String = reader.optional("dataset")?.unwrap_or_else(|| "morse".to_string());
        let template = if dataset_kind == "morse" { TrainConfig::morse() } else { TrainConfig::mnist() };
        let train = TrainConfig {
            optimizer: reader.optional::<Optimizer>("optimizer")?.unwrap_or(template.optimizer),
            learning_rate: reader.optional("lr")?.unwrap_or(template.learning_rate),
            adam_beta1: reader.optional("adam_beta1")?.unwrap_or(template.adam_beta1),
            adam_beta2: reader.optional("adam_beta2")?.unwrap_or(template.adam_beta2),
            adam_epsilon: reader.optional("adam_epsilon")?.unwrap_or(template.adam_epsilon),
            l2_coefficient: reader.optional("l2")?.unwrap_or(template.l2_coefficient),
            batch_size: reader.optional("batch")?.unwrap_or(template.batch_size),
            epochs: reader.optional("epochs")?.unwrap_or(30),
            seed: 0,
            validation_fraction: reader.optional("validation_fraction")?.unwrap_or(template.validation_fraction),
        };
        train.validate()?;
        let resolve = |p: String| base.join(p);
        let dataset = match dataset_kind.as_str() {
            "morse" => {
                let d = MorseGenSpec::default();
                DatasetSource::Morse(MorseGenSpec {
                    samples_per_class: reader.optional("morse_samples_per_class")?.unwrap_or(d.samples_per_class),
                    noise_sigma: reader.optional("morse_noise")?.unwrap_or(d.noise_sigma),
                    max_shift: reader.optional("morse_max_shift")?.unwrap_or(d.max_shift),
                    seed: reader.optional("morse_seed")?.unwrap_or(d.seed),
                })
            }
            "idx" => DatasetSource::Idx {
                images: resolve(reader.required("images")?),
                labels: resolve(reader.required("labels")?),
                pad_to: reader.optional("pad_to")?,
                classes: reader.optional("classes")?,
                limit: reader.optional("limit")?,
            },
            "csv" => DatasetSource::Csv { path: resolve(reader.required("path")?), classes: reader.required("classes")? },
            other => return Err(reader.error("dataset", format!("unknown dataset {other:?}"))),
        };

        let layers = match reader.optional::<String>("layers")? {
            Some(text) => parse_list(&text).map_err(|m| reader.error("layers", m))?,
            None => Vec::new(),
        };
        let default_id = || path.file_stem().map_or_else(|| "sweep".to_string(), |s| s.to_string_lossy().into_owned());
        let spec = SweepSpec {
            id: reader.optional("id")?.unwrap_or_else(default_id),
            kind,
            layers,
            fan_outs: reader.all("fan_outs", parse_list)?,
            networks: reader.all("network", |v| {
                let (l, f) = v.split_once('/').ok_or("network is layers / fan_outs")?;
                Ok((parse_list(l)?, parse_list(f)?))
            })?,
            densities: reader.all("density", |v| v.parse())?,
            overall_density: reader.optional("overall_density")?,
            frontier_points: reader.optional("frontier_points")?,
            patterns: reader.all("pattern", |v| v.parse())?,
            repeats: reader.optional("repeats")?.unwrap_or(3),
            seed: reader.optional("seed")?.unwrap_or(0),
            train,
            dataset,
            output: reader.optional::<String>("output")?.map(resolve),
            save_runs: reader.optional("save_runs")?.unwrap_or(false),
        };
        if spec.repeats == 0 {
            return Err(reader.error("repeats", "repeats must be at least 1"));
        }
        Ok(spec)
    }

    /// Loads the dataset and splits it once, shared by every run of the sweep.
    /// With a zero validation fraction the training rows double as validation.
    pub fn load_split(&self) -> Result<(Dataset, Dataset)> {
        let data = self.dataset.load()?;
        let (train, validation) = split(&data, self.train.validation_fraction, derive_seed(self.seed, u64::MAX))?;
        if validation.is_empty() {
            let copy = train.clone();
            return Ok((train, copy));
        }
        Ok((train, validation))
    }
}

const REPEATABLE: &[&str] = &["fan_outs", "network", "density", "pattern"];

const KNOWN_KEYS: &[&str] = &[
    "id",
    "kind",
    "layers",
    "fan_outs",
    "network",
    "density",
    "overall_density",
    "frontier_points",
    "pattern",
    "repeats",
    "seed",
    "optimizer",
    "lr",
    "adam_beta1",
    "adam_beta2",
    "adam_epsilon",
    "l2",
    "batch",
    "epochs",
    "validation_fraction",
    "dataset",
    "morse_samples_per_class",
    "morse_noise",
    "morse_max_shift",
    "morse_seed",
    "images",
    "labels",
    "pad_to",
    "classes",
    "limit",
    "path",
    "output",
    "save_runs",
];

struct SpecReader<'a> {
    path: &'a Path,
    entries: &'a [(usize, String, String)],
}

impl SpecReader<'_> {
    fn error(&self, key: &str, message: impl Into<String>) -> Error {
        let line = self.entries.iter().find(|(_, k, _)| k == key).map_or(0, |(l, _, _)| *l);
        Error::parse(self.path, line, message)
    }

    fn optional<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.iter().find(|(_, k, _)| k == key) {
            None => Ok(None),
            Some((line, _, v)) => v.parse().map(Some).map_err(|_| Error::parse(self.path, *line, format!("bad value for {key}: {v:?}"))),
        }
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        self.optional(key)?.ok_or_else(|| Error::parse(self.path, 0, format!("missing key {key}")))
    }

    fn all<T>(&self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Vec<T>> {
        self.entries
            .iter()
            .filter(|(_, k, _)| k == key)
            .map(|(line, _, v)| parse(v).map_err(|m| Error::parse(self.path, *line, m)))
            .collect()
    }
}
