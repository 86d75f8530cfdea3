//! Minimal SVG charts from sweep CSVs, for a quick look at results.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// One named series of (x, y) points.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Reads columns `x` and `y` from a CSV, grouping rows by `group` if given.
pub fn series_from_csv(path: &Path, x: &str, y: &str, group: Option<&str>) -> Result<Vec<Series>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Spec(format!("{}: {e}", path.display())))?;
    let headers = reader.headers().map_err(|e| Error::Spec(e.to_string()))?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| Error::Spec(format!("no column {name:?} in {}", path.display())));
    let (xi, yi) = (column(x)?, column(y)?);
    let gi = group.map(column).transpose()?;
    let mut series: Vec<Series> = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Spec(e.to_string()))?;
        let value = |i: usize| record[i].parse::<f64>().map_err(|_| Error::parse(path, k + 2, format!("non-numeric value {:?}", &record[i])));
        let (xv, yv) = (value(xi)?, value(yi)?);
        let name = gi.map_or(y.to_string(), |g| record[g].to_string());
        match series.iter_mut().find(|s| s.name == name) {
            Some(s) => s.points.push((xv, yv)),
            None => series.push(Series { name, points: vec![(xv, yv)] }),
        }
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    Ok(series)
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Line chart with point markers, one colour per series.
pub fn line_chart(series: &[Series], x_label: &str, y_label: &str) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = bounds(all().map(|p| p.0));
    let (y0, y1) = bounds(all().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut svg = String::new();
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    writeln!(svg, r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" stroke="black" fill="none"/>"#).unwrap();
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{xv:.3}</text>"#, sx(xv), bottom + 16.0).unwrap();
        writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{yv:.3}</text>"#, left - 4.0, sy(yv) + 4.0).unwrap();
    }
    writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x_label}</text>"#, WIDTH / 2.0, HEIGHT - 10.0).unwrap();
    writeln!(svg, r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{y_label}</text>"#, HEIGHT / 2.0, HEIGHT / 2.0).unwrap();
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.1} {:.1}", sx(x), sy(y))).collect();
        writeln!(svg, r#"<path d="M{}" stroke="{color}" fill="none"/>"#, path.join(" L")).unwrap();
        for &(x, y) in &s.points {
            writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#, sx(x), sy(y)).unwrap();
        }
        writeln!(svg, r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#, right - 120.0, top + 14.0 * k as f64, s.name).unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_to_svg() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        std::fs::write(&path, "pattern,overall_density,median_accuracy\nrandom,0.5,0.9\nrandom,0.25,0.7\nplanned,0.5,0.4\n").unwrap();
        let series = series_from_csv(&path, "overall_density", "median_accuracy", Some("pattern")).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series[0].points, vec![(0.25, 0.7), (0.5, 0.9)]);
        let svg = line_chart(&series, "density", "accuracy");
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(series_from_csv(&path, "nope", "median_accuracy", None).is_err());
    }
}
