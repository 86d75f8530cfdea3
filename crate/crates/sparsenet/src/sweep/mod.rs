//! Experiment sweeps: density sweeps, fixed-overall-density junction
//! distributions and scatter studies.
//!
//! Every (point, repeat) run draws its seeds from `derive_seed`, so results do
//! not depend on scheduling; rows are sorted before they are written.

mod output;
mod spec;

use std::cmp::Ordering;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use sparsenet_core::data::Dataset;
use sparsenet_core::net::{train_split, Clock, SparseNet, TrainConfig};
use sparsenet_core::rng::derive_seed;
use sparsenet_core::scatter::{compare_scatter, scatter_vector, ScatterVector};
use sparsenet_core::topology::{generate_random_pattern, generate_windowed_pattern, ConnectionPattern, NetworkTopology};

use crate::checkpoint::{config_digest, write_checkpoint, CheckpointMeta};
use crate::error::{Error, Result};
use crate::pattern_io::write_pattern;

pub use output::{rows_to_csv, spearman, summarize, summary_to_csv, timings_to_csv, write_outcome, SummaryRow};
pub use spec::{DatasetSource, ExperimentKind, PatternChoice, Ratio, SweepSpec};

/// Wall clock for the training loop.
#[derive(Debug, Clone, Copy)]
pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Clock for WallClock {
    fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// One network configuration of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub layers: Vec<usize>,
    pub fan_outs: Vec<usize>,
    pub pattern: PatternChoice,
    pub requested_density: Option<Ratio>,
}

impl SweepPoint {
    pub fn topology(&self) -> Result<NetworkTopology> {
        Ok(NetworkTopology::new(&self.layers, &self.fan_outs)?)
    }

    /// Fresh pattern for `seed`.
    pub fn generate(&self, seed: u64) -> Result<ConnectionPattern> {
        let topology = self.topology()?;
        Ok(match &self.pattern {
            PatternChoice::Random => generate_random_pattern(&topology, seed)?,
            PatternChoice::Windowed(locs) => generate_windowed_pattern(&topology, locs, seed)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResultRow {
    pub experiment: String,
    pub point: usize,
    pub pattern: String,
    pub layers: Vec<usize>,
    pub fan_outs: Vec<usize>,
    pub junction_densities: Vec<f64>,
    pub requested_density: Option<Ratio>,
    pub overall_density: f64,
    pub equal_densities: bool,
    /// `None` when a junction's windows do not divide its layers.
    pub scatter: Option<ScatterVector>,
    pub repeat: usize,
    pub seed: u64,
    pub best_validation_accuracy: f64,
    pub final_train_loss: f64,
    pub epochs: usize,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub kind: ExperimentKind,
    pub rows: Vec<SweepResultRow>,
}

/// Seed of run `repeat` at point `point`.
pub fn run_seed(spec_seed: u64, point: usize, repeat: usize) -> u64 {
    derive_seed(derive_seed(spec_seed, point as u64), repeat as u64)
}

const PATTERN_STREAM: u64 = 0;
const INIT_STREAM: u64 = 1;
const TRAIN_STREAM: u64 = 2;

/// Feasible fan-outs of a junction: at most `n_right`, integral fan-in.
fn feasible_fan_outs(n_left: usize, n_right: usize) -> impl Iterator<Item = usize> {
    (1..=n_right).filter(move |fo| (n_left * fo) % n_right == 0)
}

/// Feasible fan-out whose junction density is nearest to `density`; ties go
/// to the sparser option.
fn nearest_fan_out(n_left: usize, n_right: usize, density: Ratio) -> usize {
    let target = density.value() * n_right as f64;
    feasible_fan_outs(n_left, n_right).min_by(|a, b| (*a as f64 - target).abs().total_cmp(&(*b as f64 - target).abs())).unwrap()
}

/// Whether `fan_outs` hit `density` exactly, in integer arithmetic.
fn achieves(layers: &[usize], fan_outs: &[usize], density: Ratio) -> bool {
    let used: u128 = layers.iter().zip(fan_outs).map(|(&n, &fo)| (n * fo) as u128).sum();
    let total: u128 = layers.windows(2).map(|w| (w[0] * w[1]) as u128).sum();
    used * density.den == density.num * total
}

/// Every two-junction fan-out pair on the `density` frontier, sparsest first
/// junction first.
pub fn density_frontier(layers: &[usize], density: Ratio) -> Result<Vec<Vec<usize>>> {
    if layers.len() != 3 {
        return Err(Error::Spec("frontier enumeration needs exactly two junctions".into()));
    }
    let (n1, n2, n3) = (layers[0], layers[1], layers[2]);
    let frontier: Vec<Vec<usize>> = feasible_fan_outs(n1, n2)
        .filter_map(|fo1| {
            // n2 * fo2 must supply the remaining weights.
            let total = (n1 * n2 + n2 * n3) as u128;
            let wanted = density.num * total;
            let have = (n1 * fo1) as u128 * density.den;
            let rest = wanted.checked_sub(have)?;
            let per = n2 as u128 * density.den;
            (rest % per == 0).then(|| rest / per).filter(|&fo2| fo2 >= 1 && fo2 <= n3 as u128).map(|fo2| vec![fo1, fo2 as usize])
        })
        .filter(|fo| (n2 * fo[1]) % n3 == 0)
        .collect();
    Ok(frontier)
}

/// Evenly spaced subset of `items` of size `count`, always keeping both ends.
fn evenly_spaced<T: Clone>(items: &[T], count: usize) -> Vec<T> {
    if count >= items.len() || items.len() < 2 {
        return items.to_vec();
    }
    if count <= 1 {
        return items[..1].to_vec();
    }
    let last = items.len() - 1;
    (0..count).map(|k| items[(k * last + (count - 1) / 2) / (count - 1)].clone()).collect()
}

/// Expands a spec into its points, validating every fan-out tuple.
pub fn expand_points(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    let point = |layers: &[usize], fan_outs: Vec<usize>, pattern: PatternChoice, requested| -> Result<SweepPoint> {
        let p = SweepPoint { layers: layers.to_vec(), fan_outs, pattern, requested_density: requested };
        p.topology()?;
        Ok(p)
    };
    let mut points = Vec::new();
    match spec.kind {
        ExperimentKind::DensitySweep => {
            for (layers, fos) in &spec.networks {
                points.push(point(layers, fos.clone(), PatternChoice::Random, None)?);
            }
            for fos in &spec.fan_outs {
                points.push(point(&spec.layers, fos.clone(), PatternChoice::Random, None)?);
            }
            for &d in &spec.densities {
                if d.num == 0 || d.num > d.den {
                    return Err(Error::Spec(format!("density {d} outside (0, 1]")));
                }
                let fos = spec.layers.windows(2).map(|w| nearest_fan_out(w[0], w[1], d)).collect();
                points.push(point(&spec.layers, fos, PatternChoice::Random, Some(d))?);
            }
        }
        ExperimentKind::JunctionDistribution => {
            let d = spec.overall_density.ok_or_else(|| Error::Spec("junction_distribution needs overall_density".into()))?;
            let tuples = if spec.fan_outs.is_empty() {
                let frontier = density_frontier(&spec.layers, d)?;
                spec.frontier_points.map_or(frontier.clone(), |n| evenly_spaced(&frontier, n))
            } else {
                spec.fan_outs.clone()
            };
            for fos in tuples {
                let p = point(&spec.layers, fos, PatternChoice::Random, Some(d))?;
                if !achieves(&p.layers, &p.fan_outs, d) {
                    let achieved = p.topology()?.overall_density();
                    return Err(Error::InfeasibleOverallDensity { fan_outs: p.fan_outs, requested: d.to_string(), achieved });
                }
                points.push(p);
            }
            points.sort_by_key(|p| p.fan_outs.clone());
        }
        ExperimentKind::ScatterStudy => {
            let [fos] = &spec.fan_outs[..] else {
                return Err(Error::Spec("scatter_study needs exactly one fan_outs line".into()));
            };
            for choice in &spec.patterns {
                points.push(point(&spec.layers, fos.clone(), choice.clone(), None)?);
            }
        }
    }
    if points.is_empty() {
        return Err(Error::Spec("the spec defines no points".into()));
    }
    Ok(points)
}

struct Shared<'a> {
    spec: &'a SweepSpec,
    train: &'a Dataset,
    validation: &'a Dataset,
    runs_dir: Option<&'a Path>,
}

fn run_one(shared: &Shared<'_>, points: &[SweepPoint], index: usize, repeat: usize) -> Result<SweepResultRow> {
    let spec = shared.spec;
    let point = &points[index];
    let seed = run_seed(spec.seed, index, repeat);
    let pattern = point.generate(derive_seed(seed, PATTERN_STREAM))?;
    let topology = pattern.topology().clone();
    let scatter = scatter_vector(&pattern).ok();
    let init_seed = derive_seed(seed, INIT_STREAM);
    let net = SparseNet::init(pattern, init_seed);
    let config = TrainConfig { seed: derive_seed(seed, TRAIN_STREAM), ..spec.train };
    let (net, report) = train_split(net, shared.train, shared.validation, &config, &WallClock::start())?;
    if let Some(dir) = shared.runs_dir {
        let stem = dir.join(format!("point{index:03}_rep{repeat:02}"));
        write_pattern(net.pattern(), &stem.with_extension("pattern"))?;
        let meta = CheckpointMeta { init_seed: Some(init_seed), config_digest: Some(config_digest(&config)) };
        write_checkpoint(&net, &meta, &stem.with_extension("ckpt"))?;
    }
    let densities: Vec<f64> = topology.junctions().iter().map(|j| j.density()).collect();
    let equal = topology.junctions().windows(2).all(|w| w[0].fan_out() * w[1].n_right() == w[1].fan_out() * w[0].n_right());
    Ok(SweepResultRow {
        experiment: spec.id.clone(),
        point: index,
        pattern: point.pattern.to_string(),
        layers: point.layers.clone(),
        fan_outs: point.fan_outs.clone(),
        junction_densities: densities,
        requested_density: point.requested_density,
        overall_density: topology.overall_density(),
        equal_densities: equal,
        scatter,
        repeat,
        seed,
        best_validation_accuracy: report.best_validation_accuracy,
        final_train_loss: *report.train_loss.last().unwrap(),
        epochs: config.epochs,
        runtime_seconds: report.wall_seconds,
    })
}

/// Orders two rows by scatter, best first; rows without scatter go last.
fn scatter_order(a: &SweepResultRow, b: &SweepResultRow) -> Ordering {
    match (&a.scatter, &b.scatter) {
        (Some(x), Some(y)) => compare_scatter(y, x).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

fn sort_rows(kind: ExperimentKind, rows: &mut [SweepResultRow]) {
    let by_point = |a: &SweepResultRow, b: &SweepResultRow| a.point.cmp(&b.point).then(a.repeat.cmp(&b.repeat));
    match kind {
        ExperimentKind::DensitySweep => rows.sort_by(|a, b| a.overall_density.total_cmp(&b.overall_density).then(a.seed.cmp(&b.seed)).then(by_point(a, b))),
        ExperimentKind::JunctionDistribution => rows.sort_by(|a, b| a.junction_densities[0].total_cmp(&b.junction_densities[0]).then(by_point(a, b))),
        ExperimentKind::ScatterStudy => rows.sort_by(|a, b| scatter_order(a, b).then(by_point(a, b))),
    }
}

/// Runs every (point, repeat) pair of `spec`, in parallel when rayon has
/// threads. With `runs_dir`, each run's pattern and checkpoint are saved there.
pub fn run_sweep(spec: &SweepSpec, runs_dir: Option<&Path>) -> Result<SweepOutcome> {
    let points = expand_points(spec)?;
    let (train, validation) = spec.load_split()?;
    let shared = Shared { spec, train: &train, validation: &validation, runs_dir };
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| (0..spec.repeats).map(move |r| (p, r))).collect();
    let mut rows = jobs.par_iter().map(|&(p, r)| run_one(&shared, &points, p, r)).collect::<Result<Vec<_>>>()?;
    sort_rows(spec.kind, &mut rows);
    Ok(SweepOutcome { kind: spec.kind, rows })
}

fn expect_kind(spec: &SweepSpec, kind: ExperimentKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::Spec(format!("spec kind is {}, expected {}", spec.kind.as_str(), kind.as_str())));
    }
    Ok(())
}

pub fn run_density_sweep(spec: &SweepSpec) -> Result<Vec<SweepResultRow>> {
    expect_kind(spec, ExperimentKind::DensitySweep)?;
    Ok(run_sweep(spec, None)?.rows)
}

pub fn run_junction_distribution(spec: &SweepSpec) -> Result<Vec<SweepResultRow>> {
    expect_kind(spec, ExperimentKind::JunctionDistribution)?;
    Ok(run_sweep(spec, None)?.rows)
}

pub fn run_scatter_study(spec: &SweepSpec) -> Result<Vec<SweepResultRow>> {
    expect_kind(spec, ExperimentKind::ScatterStudy)?;
    Ok(run_sweep(spec, None)?.rows)
}

/// Where the per-run files of a sweep writing `csv` go.
pub fn runs_dir_for(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map_or_else(|| "sweep".into(), |s| s.to_string_lossy().into_owned());
    csv.with_file_name(format!("{stem}.runs"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sparsenet_core::data::MorseGenSpec;

    fn base_spec(kind: ExperimentKind) -> SweepSpec {
        SweepSpec {
            id: "t".into(),
            kind,
            layers: vec![64, 1024, 64],
            fan_outs: vec![],
            networks: vec![],
            densities: vec![],
            overall_density: None,
            frontier_points: None,
            patterns: vec![],
            repeats: 1,
            seed: 0,
            train: TrainConfig { epochs: 1, ..TrainConfig::morse() },
            dataset: DatasetSource::Morse(MorseGenSpec { samples_per_class: 2, ..Default::default() }),
            output: None,
            save_runs: false,
        }
    }

    #[test]
    fn morse_half_density_frontier() {
        let frontier = density_frontier(&[64, 1024, 64], Ratio { num: 1, den: 2 }).unwrap();
        assert_eq!(frontier.len(), 63);
        assert_eq!(frontier[0], vec![16, 63]);
        assert_eq!(frontier[62], vec![1008, 1]);
        assert!(frontier.iter().all(|f| f[0] + 16 * f[1] == 1024));
        assert!(frontier.contains(&vec![512, 32]));
        let five = evenly_spaced(&frontier, 5);
        assert_eq!(five.first(), frontier.first());
        assert_eq!(five.last(), frontier.last());
        assert_eq!(five[2], vec![512, 32]);
    }

    #[test]
    fn full_density_has_one_point() {
        assert_eq!(density_frontier(&[64, 1024, 64], Ratio { num: 1, den: 1 }).unwrap(), vec![vec![1024, 64]]);
    }

    #[test]
    fn infeasible_tuple_is_rejected() {
        let mut spec = base_spec(ExperimentKind::JunctionDistribution);
        spec.overall_density = Some(Ratio { num: 1, den: 2 });
        spec.fan_outs = vec![vec![512, 32], vec![512, 16]];
        assert!(matches!(expand_points(&spec), Err(Error::InfeasibleOverallDensity { .. })));
        spec.fan_outs.pop();
        assert_eq!(expand_points(&spec).unwrap().len(), 1);
    }

    #[test]
    fn density_targets_snap_to_feasible_fan_outs() {
        let mut spec = base_spec(ExperimentKind::DensitySweep);
        spec.densities = ["0.125", "0.25", "1/2", "1"].iter().map(|s| s.parse().unwrap()).collect();
        let points = expand_points(&spec).unwrap();
        let fos: Vec<Vec<usize>> = points.iter().map(|p| p.fan_outs.clone()).collect();
        assert_eq!(fos, vec![vec![128, 8], vec![256, 16], vec![512, 32], vec![1024, 64]]);
        // 784 -> 100 cannot hit 1/3 exactly; the nearest feasible fan-out wins.
        assert_eq!(nearest_fan_out(784, 100, "1/3".parse().unwrap()), 25);
    }

    #[test]
    fn single_point_single_row_and_determinism() {
        let mut spec = base_spec(ExperimentKind::DensitySweep);
        spec.layers = vec![64, 32, 64];
        spec.fan_outs = vec![vec![8, 4]];
        let a = run_sweep(&spec, None).unwrap();
        assert_eq!(a.rows.len(), 1);
        let b = run_sweep(&spec, None).unwrap();
        assert_eq!(rows_to_csv(&a.rows), rows_to_csv(&b.rows));
    }

    #[test]
    fn scatter_study_rows_are_ordered() {
        let mut spec = base_spec(ExperimentKind::ScatterStudy);
        spec.fan_outs = vec![vec![128, 8]];
        spec.patterns = vec!["8:128 128:1".parse().unwrap(), PatternChoice::Random, "full full".parse().unwrap()];
        let rows = run_sweep(&spec, None).unwrap().rows;
        for w in rows.windows(2) {
            let (a, b) = (w[0].scatter.as_ref().unwrap(), w[1].scatter.as_ref().unwrap());
            assert_ne!(compare_scatter(a, b).unwrap(), Ordering::Less);
        }
        assert_eq!(rows[0].pattern, "full full");
        assert_eq!(rows.last().unwrap().pattern, "8:128 128:1");
    }
}
