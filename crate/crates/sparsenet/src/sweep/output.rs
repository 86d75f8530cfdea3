//! CSV emission for sweep results.
//!
//! The main CSV and the summary are pure functions of the spec. Wall-clock
//! times go to a separate `.timings.csv` so reruns stay byte-identical.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::Path;

use sparsenet_core::scatter::{compare_scatter, scatter_metric, ScatterVector};

use super::{SweepOutcome, SweepResultRow};
use crate::error::Result;
use crate::textfile::write_text;

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

fn scatter_labels(junctions: usize) -> Vec<String> {
    let mut labels: Vec<String> = (1..=junctions).flat_map(|i| [format!("S_{i}f"), format!("S_{i}b")]).collect();
    labels.push("S_f".into());
    labels.push("S_b".into());
    labels
}

fn max_junctions(rows: &[SweepResultRow]) -> usize {
    rows.iter().map(|r| r.layers.len() - 1).max().unwrap_or(0)
}

fn scatter_cells(scatter: Option<&ScatterVector>, width: usize) -> Vec<String> {
    let mut cells: Vec<String> = match scatter {
        Some(v) => v.values().iter().map(|x| format!("{x:.6}")).collect(),
        None => Vec::new(),
    };
    let metric = scatter.map(|v| format!("{:.6}", scatter_metric(v))).unwrap_or_default();
    cells.resize(width, String::new());
    cells.push(metric);
    cells
}

pub fn rows_to_csv(rows: &[SweepResultRow]) -> String {
    let j = max_junctions(rows);
    let mut out = String::from("experiment,point,pattern,layers,fan_outs,junction_densities,requested_density,overall_density,equal_densities,");
    for label in scatter_labels(j) {
        write!(out, "{label},").unwrap();
    }
    out.push_str("S,repeat,seed,best_validation_accuracy,final_train_loss,epochs\n");
    for r in rows {
        let densities: Vec<String> = r.junction_densities.iter().map(|d| format!("{d:.6}")).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6},{},{},{},{},{:.4},{:.6},{}",
            r.experiment,
            r.point,
            r.pattern,
            join(&r.layers),
            join(&r.fan_outs),
            densities.join(";"),
            r.requested_density.map(|d| d.to_string()).unwrap_or_default(),
            r.overall_density,
            r.equal_densities,
            scatter_cells(r.scatter.as_ref(), 2 * j + 2).join(","),
            r.repeat,
            r.seed,
            r.best_validation_accuracy,
            r.final_train_loss,
            r.epochs
        )
        .unwrap();
    }
    out
}

pub fn timings_to_csv(rows: &[SweepResultRow]) -> String {
    let mut out = String::from("point,repeat,runtime_seconds\n");
    for r in rows {
        writeln!(out, "{},{},{:.3}", r.point, r.repeat, r.runtime_seconds).unwrap();
    }
    out
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Per-point aggregate over repeats.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub point: usize,
    pub pattern: String,
    pub layers: Vec<usize>,
    pub fan_outs: Vec<usize>,
    pub junction_densities: Vec<f64>,
    pub overall_density: f64,
    /// Scatter of the first repeat's pattern.
    pub scatter: Option<ScatterVector>,
    pub runs: usize,
    pub median_accuracy: f64,
    pub min_accuracy: f64,
    pub max_accuracy: f64,
}

/// Summary rows in the order their points first appear in `rows`.
pub fn summarize(rows: &[SweepResultRow]) -> Vec<SummaryRow> {
    let mut order: Vec<usize> = Vec::new();
    for r in rows {
        if !order.contains(&r.point) {
            order.push(r.point);
        }
    }
    order
        .into_iter()
        .map(|p| {
            let group: Vec<&SweepResultRow> = rows.iter().filter(|r| r.point == p).collect();
            let mut acc: Vec<f64> = group.iter().map(|r| r.best_validation_accuracy).collect();
            let first = group.iter().min_by_key(|r| r.repeat).unwrap();
            SummaryRow {
                point: p,
                pattern: first.pattern.clone(),
                layers: first.layers.clone(),
                fan_outs: first.fan_outs.clone(),
                junction_densities: first.junction_densities.clone(),
                overall_density: first.overall_density,
                scatter: first.scatter.clone(),
                runs: group.len(),
                median_accuracy: median(&mut acc),
                min_accuracy: acc[0],
                max_accuracy: acc[acc.len() - 1],
            }
        })
        .collect()
}

pub fn summary_to_csv(summary: &[SummaryRow]) -> String {
    let mut out = String::from("point,pattern,layers,fan_outs,junction_densities,overall_density,S,min_occurrences,runs,median_accuracy,min_accuracy,max_accuracy\n");
    for s in summary {
        let densities: Vec<String> = s.junction_densities.iter().map(|d| format!("{d:.6}")).collect();
        let (metric, occ) = match &s.scatter {
            Some(v) => (format!("{:.6}", scatter_metric(v)), v.min_occurrences().to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{:.6},{},{},{},{:.4},{:.4},{:.4}",
            s.point,
            s.pattern,
            join(&s.layers),
            join(&s.fan_outs),
            densities.join(";"),
            s.overall_density,
            metric,
            occ,
            s.runs,
            s.median_accuracy,
            s.min_accuracy,
            s.max_accuracy
        )
        .unwrap();
    }
    out
}

/// Average ranks (1-based) under `cmp`, ties sharing their mean rank.
fn average_ranks<T>(items: &[T], cmp: impl Fn(&T, &T) -> Ordering) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.sort_by(|&a, &b| cmp(&items[a], &items[b]));
    let mut ranks = vec![0.0; items.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && cmp(&items[idx[start]], &items[idx[end]]) == Ordering::Equal {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

/// Spearman correlation between scatter order (by `compare_scatter`) and
/// accuracy over the rows that have a scatter vector.
pub fn spearman(rows: &[SweepResultRow]) -> Option<f64> {
    let with: Vec<&SweepResultRow> = rows.iter().filter(|r| r.scatter.is_some()).collect();
    if with.len() < 2 {
        return None;
    }
    let sr = average_ranks(&with, |a, b| compare_scatter(a.scatter.as_ref().unwrap(), b.scatter.as_ref().unwrap()).unwrap_or(Ordering::Equal));
    let ar = average_ranks(&with, |a, b| a.best_validation_accuracy.total_cmp(&b.best_validation_accuracy));
    Some(pearson(&sr, &ar))
}

fn sibling(csv: &Path, suffix: &str) -> std::path::PathBuf {
    let stem = csv.file_stem().map_or_else(|| "sweep".into(), |s| s.to_string_lossy().into_owned());
    csv.with_file_name(format!("{stem}.{suffix}.csv"))
}

/// Writes `csv`, `<stem>.summary.csv` and `<stem>.timings.csv`.
pub fn write_outcome(outcome: &SweepOutcome, csv: &Path) -> Result<()> {
    write_text(csv, &rows_to_csv(&outcome.rows))?;
    write_text(&sibling(csv, "summary"), &summary_to_csv(&summarize(&outcome.rows)))?;
    write_text(&sibling(csv, "timings"), &timings_to_csv(&outcome.rows))
}
