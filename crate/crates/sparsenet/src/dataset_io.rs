//! Dataset files: IDX (optionally gzip-compressed) and CSV.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;
use sparsenet_core::data::{dataset_from_idx, parse_idx_images, parse_idx_labels, Dataset};

use crate::error::{Error, Result};
use crate::textfile::write_text;

/// Reads a file, gunzipping it when it starts with the gzip magic bytes.
pub fn read_maybe_gz(path: &Path) -> Result<Vec<u8>> {
    let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(&raw[..]).read_to_end(&mut out).map_err(|e| Error::io(path, e))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

pub fn load_idx_images(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let images = parse_idx_images(&read_maybe_gz(images_path)?)?;
    let labels = parse_idx_labels(&read_maybe_gz(labels_path)?)?;
    let name = images_path.file_name().map_or_else(|| "idx".to_string(), |n| n.to_string_lossy().into_owned());
    Ok(dataset_from_idx(&images, &labels, &name)?)
}

/// Header `x1,...,xN,label`, one row per sample, values with 17 significant
/// digits.
pub fn dataset_to_csv(dataset: &Dataset) -> String {
    let mut out = String::new();
    for k in 1..=dataset.dim() {
        write!(out, "x{k},").unwrap();
    }
    out.push_str("label\n");
    for i in 0..dataset.len() {
        for v in dataset.input(i) {
            write!(out, "{v:.16e},").unwrap();
        }
        writeln!(out, "{}", dataset.label(i)).unwrap();
    }
    out
}

pub fn write_dataset_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    write_text(path, &dataset_to_csv(dataset))
}

/// Reads a CSV written by [`write_dataset_csv`]: feature columns, then the
/// label.
pub fn read_dataset_csv(path: &Path, class_count: usize) -> Result<Dataset> {
    let csv_error = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line() as usize);
        Error::parse(path, line, e.to_string())
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_error)?;
    let dim = reader.headers().map_err(csv_error)?.len().checked_sub(1).filter(|&d| d > 0).ok_or_else(|| Error::parse(path, 1, "no feature columns"))?;
    let mut inputs = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        for f in record.iter().take(dim) {
            inputs.push(f.trim().parse::<f64>().map_err(|_| Error::parse(path, line, "bad feature value"))?);
        }
        labels.push(record[dim].trim().parse::<usize>().map_err(|_| Error::parse(path, line, "bad label"))?);
    }
    let name = path.file_stem().map_or_else(|| "csv".to_string(), |n| n.to_string_lossy().into_owned());
    Ok(Dataset::new(name, dim, class_count, inputs, labels)?)
}
