//! Acceptance criteria 1 to 11, one pass/fail line each.
//!
//! Runs under `cargo test` with a plain `main`; pass criterion numbers as
//! arguments to run a subset, e.g. `cargo test --test acceptance -- 3 4`.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use sparsenet::core::net::{gradient_check, SparseNet};
use sparsenet::core::rng::{derive_seed, SplitMix64};
use sparsenet::core::scatter::{left_window_adjacency, make_partition, right_window_adjacency, scatter_metric, scatter_vector};
use sparsenet::core::topology::{generate_random_pattern, generate_windowed_pattern, ConnectionPattern, Locality, NetworkTopology};
use sparsenet::sweep::{run_sweep, spearman, summarize, SummaryRow, SweepSpec};

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn specs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn summary_of(spec: &Path) -> (Vec<SummaryRow>, Option<f64>) {
    let spec = SweepSpec::from_file(spec).expect("spec parses");
    let outcome = run_sweep(&spec, None).expect("sweep runs");
    (summarize(&outcome.rows), spearman(&outcome.rows))
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

fn biregular_invariants() -> Verdict {
    let start = Instant::now();
    let mut rng = SplitMix64::new(1);
    let mut failures = 0;
    let mut largest = 0;
    for case in 0..1000u64 {
        let topology = support::random_topology(&mut rng, 3, 4096, 1 << 17);
        largest = largest.max(*topology.layer_sizes().iter().max().unwrap());
        let pattern = generate_random_pattern(&topology, derive_seed(7, case)).unwrap();
        let ok = topology.junctions().iter().zip(pattern.adjacency()).all(|(spec, a)| {
            a.is_binary()
                && a.row_sums().iter().all(|&s| s == spec.fan_in() as u64)
                && a.col_sums().iter().all(|&s| s == spec.fan_out() as u64)
        });
        failures += usize::from(!ok);
    }
    let elapsed = start.elapsed();
    verdict(
        failures == 0 && elapsed < Duration::from_secs(60),
        format!("1000 cases, largest layer {largest}, {failures} failures, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn composition_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = SplitMix64::new(2);
    let (mut spans, mut mismatches) = (0, 0);
    for net in 0..64u64 {
        let topology = support::random_topology(&mut rng, 4, 32, 1 << 10);
        let pattern = generate_random_pattern(&topology, net).unwrap();
        let j = topology.junction_count();
        for first in 0..j {
            for last in first..j {
                spans += 1;
                let composed = pattern.compose(first, last).unwrap();
                let exact = (0..topology.layer_sizes()[first]).all(|from| {
                    support::count_paths(&pattern, first, last, from)
                        .iter()
                        .enumerate()
                        .all(|(to, &count)| composed.get(to, from) == count)
                });
                mismatches += usize::from(!exact);
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        mismatches == 0 && elapsed < Duration::from_secs(60),
        format!("64 networks, {spans} spans, {mismatches} mismatches, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn scatter_worked_example() -> Verdict {
    let v = scatter_vector(&support::figure_example()).unwrap();
    let s1f = v.values()[0];
    let dense_ok = [&[8usize, 4, 4][..], &[64, 1024, 64], &[784, 112, 10]]
        .iter()
        .all(|sizes| scatter_vector(&ConnectionPattern::dense(sizes).unwrap()).unwrap().values().iter().all(|&x| x == 1.0));
    verdict(s1f == 0.75 && dense_ok, format!("S_1f = {s1f}, fully connected all ones: {dense_ok}"))
}

fn full_spread_all_sixteen() -> Verdict {
    let topology = NetworkTopology::new(&[64, 1024, 64], &[128, 8]).unwrap();
    let pattern = generate_windowed_pattern(&topology, &[Locality::Full, Locality::Full], 0).unwrap();
    let composed = pattern.compose(0, 1).unwrap();
    let (fo, fi) = topology.equivalent_fans(0, 1).unwrap();
    let lp = make_partition(64, fi).unwrap();
    let rp = make_partition(64, fo).unwrap();
    let left = left_window_adjacency(&composed, &lp).unwrap();
    let right = right_window_adjacency(&composed, &rp).unwrap();
    let clamped = lp.neurons_per_window() == 1 && rp.neurons_per_window() == 1;
    let sixteens = left.entries().iter().chain(right.entries()).all(|&e| e == 16);
    verdict(
        (fo, fi) == (1024, 1024) && clamped && sixteens,
        format!("fans ({fo},{fi}), windows of one neuron: {clamped}, every entry 16: {sixteens}"),
    )
}

fn gradient_check_criterion() -> Verdict {
    let start = Instant::now();
    let sparse = generate_random_pattern(&NetworkTopology::new(&[6, 8, 4], &[4, 2]).unwrap(), 0).unwrap();
    let dense = ConnectionPattern::dense(&[6, 8, 4]).unwrap();
    let a = gradient_check(&SparseNet::init(sparse, 0), 5, 1e-5, 0).unwrap();
    let b = gradient_check(&SparseNet::init(dense, 0), 5, 1e-5, 0).unwrap();
    let elapsed = start.elapsed();
    verdict(
        a.pass && b.pass && elapsed < Duration::from_secs(10),
        format!("max rel error sparse {:.2e}, dense {:.2e}, {:.2}s", a.max_rel_error, b.max_rel_error, elapsed.as_secs_f64()),
    )
}

fn dense_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = SplitMix64::new(6);
    let mut worst: f64 = 0.0;
    for shape in 0..100u64 {
        let topology = support::random_topology(&mut rng, 3, 32, 1 << 10);
        let pattern = if shape % 10 == 0 {
            ConnectionPattern::dense(topology.layer_sizes()).unwrap()
        } else {
            generate_random_pattern(&topology, shape).unwrap()
        };
        let mut net = SparseNet::init(pattern, shape);
        support::jitter_biases(&mut net, &mut rng);
        let batch = 1 + rng.below(8);
        worst = worst.max(support::check_against_oracle(&net, &mut rng, batch, 1e-3));
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-12 && elapsed < Duration::from_secs(60),
        format!("100 shapes, worst relative error {worst:.2e}, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn morse_density_plateau() -> Verdict {
    let text = "\
id = morse_plateau
kind = density_sweep
layers = 64,1024,64
fan_outs = 1024,64
fan_outs = 512,32
epochs = 30
repeats = 3
seed = 7
";
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plateau.spec");
    std::fs::write(&path, text).unwrap();
    let start = Instant::now();
    let (summary, _) = summary_of(&path);
    let median = |fo: &[usize]| summary.iter().find(|s| s.fan_outs == fo).unwrap().median_accuracy;
    let (full, half) = (median(&[1024, 64]), median(&[512, 32]));
    let elapsed = start.elapsed();
    verdict(
        (full - half).abs() <= 0.02 && elapsed < Duration::from_secs(900),
        format!("median FCL {}%, 50% density {}%, {:.0}s", pct(full), pct(half), elapsed.as_secs_f64()),
    )
}

fn mnist_ordering() -> Verdict {
    let start = Instant::now();
    let (summary, _) = summary_of(&specs_dir().join("mnist_family.spec"));
    let medians: Vec<f64> = [224, 112, 56, 28]
        .iter()
        .map(|&h| summary.iter().find(|s| s.layers[1] == h).unwrap().median_accuracy)
        .collect();
    let inversions: Vec<f64> = medians.windows(2).filter(|w| w[0] < w[1]).map(|w| w[1] - w[0]).collect();
    let ties_ok = inversions.len() <= 1 && inversions.iter().all(|&d| d <= 0.003 + 1e-12);
    let elapsed = start.elapsed();
    verdict(
        ties_ok && elapsed < Duration::from_secs(3600),
        format!(
            "medians 224/112/56/28: {}, {} tied pair(s), {:.0}s",
            medians.iter().map(|&m| pct(m)).collect::<Vec<_>>().join(" / "),
            inversions.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn junction_distribution() -> Verdict {
    let (summary, _) = summary_of(&specs_dir().join("morse50.spec"));
    let starved_second = summary.iter().min_by(|a, b| a.junction_densities[1].total_cmp(&b.junction_densities[1])).unwrap();
    let starved_first = summary.iter().min_by(|a, b| a.junction_densities[0].total_cmp(&b.junction_densities[0])).unwrap();
    // Junction 1 minimal / junction 2 maximal is `starved_first`.
    let best = summary.iter().max_by(|a, b| a.median_accuracy.total_cmp(&b.median_accuracy)).unwrap();
    let gap = starved_second.median_accuracy - starved_first.median_accuracy;
    let listing: Vec<String> =
        summary.iter().map(|s| format!("({},{}) {}", s.fan_outs[0], s.fan_outs[1], pct(s.median_accuracy))).collect();
    verdict(
        gap >= 0.10 && best.junction_densities[1] >= best.junction_densities[0],
        format!("{}; extreme gap {} points; best ({},{})", listing.join(", "), pct(gap), best.fan_outs[0], best.fan_outs[1]),
    )
}

fn scatter_correlation() -> Verdict {
    let (summary, rho) = summary_of(&specs_dir().join("morse_scatter.spec"));
    let scatter = |s: &SummaryRow| scatter_metric(s.scatter.as_ref().unwrap());
    let mut planned: Vec<&SummaryRow> = summary.iter().filter(|s| scatter(s) == 0.125).collect();
    planned.sort_by_key(|s| s.scatter.as_ref().unwrap().min_occurrences());
    let occurrences: Vec<usize> = planned.iter().map(|s| s.scatter.as_ref().unwrap().min_occurrences()).collect();
    let strictly = planned.windows(2).all(|w| w[0].median_accuracy > w[1].median_accuracy);
    let random = summary.iter().find(|s| s.pattern == "random").unwrap();
    let highest = summary.iter().all(|s| scatter(s) <= scatter(random));
    let beats = planned.iter().all(|s| random.median_accuracy > s.median_accuracy);
    let rho = rho.unwrap_or(f64::NAN);
    verdict(
        occurrences == [1, 2, 3] && strictly && highest && beats && rho > 0.0,
        format!(
            "S=1/8 by occurrences 1/2/3: {}; random (S={:.3}) {}; spearman {rho:.3}",
            planned.iter().map(|s| pct(s.median_accuracy)).collect::<Vec<_>>().join(" / "),
            scatter(random),
            pct(random.median_accuracy)
        ),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("det.spec");
    std::fs::write(
        &spec,
        "\
id = det
kind = scatter_study
layers = 64,128,64
fan_outs = 32,16
pattern = random
pattern = full full
pattern = 8:32 32:8
morse_samples_per_class = 8
epochs = 2
repeats = 2
seed = 11
",
    )
    .unwrap();
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run).join("det.csv");
        let output = Command::new(env!("CARGO_BIN_EXE_sparsenet"))
            .args(["sweep", "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap(), "--save-runs"])
            .output()
            .unwrap();
        assert!(output.status.success(), "sweep failed: {}", String::from_utf8_lossy(&output.stderr));
        trees.push(read_tree(&dir.path().join(run)));
    }
    let kinds = |ext: &str| trees[0].iter().filter(|(n, _)| n.ends_with(ext)).count();
    let compared: Vec<_> = trees
        .iter()
        .map(|t| t.iter().filter(|(n, _)| !n.ends_with(".timings.csv")).cloned().collect::<Vec<_>>())
        .collect();
    let identical = compared[0] == compared[1];
    verdict(
        identical && kinds(".pattern") == 6 && kinds(".ckpt") == 6,
        format!(
            "{} pattern files, {} checkpoints, {} CSVs compared; identical: {identical}",
            kinds(".pattern"),
            kinds(".ckpt"),
            compared[0].iter().filter(|(n, _)| n.ends_with(".csv")).count()
        ),
    )
}

fn read_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let name = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((name, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("biregular invariants", biregular_invariants),
        ("composition equals path enumeration", composition_oracle),
        ("scatter worked example", scatter_worked_example),
        ("full-spread Morse all-16 windows", full_spread_all_sixteen),
        ("gradient check", gradient_check_criterion),
        ("dense masked oracle", dense_oracle),
        ("Morse 50% density plateau", morse_density_plateau),
        ("MNIST sparse-vs-small ordering", mnist_ordering),
        ("junction distribution", junction_distribution),
        ("scatter-performance correlation", scatter_correlation),
        ("determinism", determinism),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let number = k + 1;
        if !selected.is_empty() && !selected.contains(&number) {
            continue;
        }
        let v = run();
        println!("criterion {number:>2} {} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed.push(number);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
