//! In-memory datasets: fixed-dimension real inputs with integer class labels.

mod idx;
mod morse;

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

pub use idx::{dataset_from_idx, parse_idx_images, parse_idx_labels, IdxImages};
pub use morse::{codeword, codewords, prototype_frame, synthesize_morse, MorseGenSpec, FRAME_LEN, MORSE_CLASSES};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    dim: usize,
    class_count: usize,
    inputs: Vec<f64>,
    labels: Vec<usize>,
}

impl Dataset {
    /// `inputs` is row-major, `labels.len()` rows of `dim` values each.
    pub fn new(name: impl Into<String>, dim: usize, class_count: usize, inputs: Vec<f64>, labels: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroSize("input dimension"));
        }
        if class_count == 0 {
            return Err(Error::ZeroSize("class count"));
        }
        if inputs.len() != labels.len() * dim {
            return Err(Error::DimensionMismatch { expected: labels.len() * dim, found: inputs.len() });
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= class_count) {
            return Err(Error::BadLabel { label, classes: class_count });
        }
        Ok(Dataset { name: name.into(), dim, class_count, inputs, labels })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.class_count];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut inputs = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            inputs.extend_from_slice(self.input(i));
        }
        Dataset {
            name: self.name.clone(),
            dim: self.dim,
            class_count: self.class_count,
            inputs,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Widens the label space; the extra classes never occur as labels.
    pub fn with_class_count(mut self, class_count: usize) -> Result<Self> {
        if class_count < self.class_count {
            return Err(Error::InvalidConfig("class count can only grow"));
        }
        self.class_count = class_count;
        Ok(self)
    }

    /// Zero-pads square `side x side` images to `new_side x new_side`, centred.
    pub fn pad_square(&self, side: usize, new_side: usize) -> Result<Self> {
        if side * side != self.dim {
            return Err(Error::DimensionMismatch { expected: side * side, found: self.dim });
        }
        if new_side < side {
            return Err(Error::InvalidConfig("padding cannot shrink images"));
        }
        let before = (new_side - side) / 2;
        let mut inputs = alloc::vec![0.0; self.len() * new_side * new_side];
        for i in 0..self.len() {
            let src = self.input(i);
            let dst = &mut inputs[i * new_side * new_side..(i + 1) * new_side * new_side];
            for r in 0..side {
                let at = (r + before) * new_side + before;
                dst[at..at + side].copy_from_slice(&src[r * side..(r + 1) * side]);
            }
        }
        Dataset::new(self.name.clone(), new_side * new_side, self.class_count, inputs, self.labels.clone())
    }
}

/// Stratified split into `(train, validation)`.
///
/// Each class is shuffled independently and `round(count * fraction)` of its
/// rows go to validation, capped so every class keeps at least one training
/// row. Both halves keep the original row order.
pub fn split(dataset: &Dataset, validation_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(0.0..1.0).contains(&validation_fraction) {
        return Err(Error::InvalidConfig("validation fraction must lie in [0, 1)"));
    }
    let mut rng = SplitMix64::new(seed);
    let mut by_class: Vec<Vec<usize>> = alloc::vec![Vec::new(); dataset.class_count()];
    for (i, &l) in dataset.labels().iter().enumerate() {
        by_class[l].push(i);
    }
    let mut is_validation = alloc::vec![false; dataset.len()];
    for rows in by_class.iter_mut().filter(|r| !r.is_empty()) {
        rng.shuffle(rows);
        let wanted = libm::round(rows.len() as f64 * validation_fraction) as usize;
        for &i in &rows[..wanted.min(rows.len() - 1)] {
            is_validation[i] = true;
        }
    }
    let (val, train): (Vec<usize>, Vec<usize>) = (0..dataset.len()).partition(|&i| is_validation[i]);
    Ok((dataset.subset(&train), dataset.subset(&val)))
}
