//! Mini-batch training loop, optimizers and accuracy evaluation.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{add_l2, Activations, Backprop, Gradients, SparseNet};
use crate::data::{split, Dataset};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};

const SPLIT_STREAM: u64 = 0;
const SHUFFLE_STREAM: u64 = 1;
const EVAL_CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimizer {
    Sgd,
    Adam,
}

impl Optimizer {
    pub fn as_str(&self) -> &'static str {
        match self {
            Optimizer::Sgd => "sgd",
            Optimizer::Adam => "adam",
        }
    }
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sgd" => Ok(Optimizer::Sgd),
            "adam" => Ok(Optimizer::Adam),
            _ => Err(Error::InvalidConfig("optimizer must be sgd or adam")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub optimizer: Optimizer,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub l2_coefficient: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub validation_fraction: f64,
}

impl Default for TrainConfig {
    /// Adam at 1e-3, batch 128, no regularization, 30 epochs, 20% validation.
    fn default() -> Self {
        TrainConfig {
            optimizer: Optimizer::Adam,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            l2_coefficient: 0.0,
            batch_size: 128,
            epochs: 30,
            seed: 0,
            validation_fraction: 0.2,
        }
    }
}

impl TrainConfig {
    /// Plain SGD at 1.0, no L2, 30 epochs.
    pub fn morse() -> Self {
        TrainConfig { optimizer: Optimizer::Sgd, learning_rate: 1.0, ..Default::default() }
    }

    /// Adam at 1e-3 with L2 1e-4, 100 epochs.
    pub fn mnist() -> Self {
        TrainConfig { l2_coefficient: 1e-4, epochs: 100, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning rate must be finite and non-negative"));
        }
        if !(self.adam_beta1 > 0.0 && self.adam_beta1 < 1.0 && self.adam_beta2 > 0.0 && self.adam_beta2 < 1.0) {
            return Err(Error::InvalidConfig("adam betas must lie in (0, 1)"));
        }
        if self.adam_epsilon.is_nan() || self.adam_epsilon <= 0.0 {
            return Err(Error::InvalidConfig("adam epsilon must be positive"));
        }
        if !(self.l2_coefficient >= 0.0 && self.l2_coefficient.is_finite()) {
            return Err(Error::InvalidConfig("l2 coefficient must be finite and non-negative"));
        }
        if self.batch_size == 0 {
            return Err(Error::ZeroSize("batch size"));
        }
        if self.epochs == 0 {
            return Err(Error::ZeroSize("epochs"));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::InvalidConfig("validation fraction must lie in [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean cross-entropy over each epoch's mini-batches, before each update.
    pub train_loss: Vec<f64>,
    pub validation_accuracy: Vec<f64>,
    pub best_validation_accuracy: f64,
    pub wall_seconds: f64,
}

/// Wall-clock source, kept abstract so training works without `std`.
pub trait Clock {
    fn seconds(&self) -> f64;
}

/// A clock that never advances.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn seconds(&self) -> f64 {
        0.0
    }
}

/// Splits `dataset` by `config.validation_fraction` and trains on the larger
/// part. With a zero fraction the training data doubles as validation data.
pub fn train(net: SparseNet, dataset: &Dataset, config: &TrainConfig, clock: &dyn Clock) -> Result<(SparseNet, TrainReport)> {
    config.validate()?;
    let (train_set, validation) = split(dataset, config.validation_fraction, derive_seed(config.seed, SPLIT_STREAM))?;
    let validation = if validation.is_empty() { &train_set } else { &validation };
    train_split(net, &train_set, validation, config, clock)
}

/// Trains on `train_set`, scoring `validation` after every epoch.
pub fn train_split(
    mut net: SparseNet,
    train_set: &Dataset,
    validation: &Dataset,
    config: &TrainConfig,
    clock: &dyn Clock,
) -> Result<(SparseNet, TrainReport)> {
    config.validate()?;
    if train_set.is_empty() || validation.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for d in [train_set, validation] {
        if d.dim() != net.input_size() {
            return Err(Error::DimensionMismatch { expected: net.input_size(), found: d.dim() });
        }
        if d.class_count() > net.output_size() {
            return Err(Error::BadLabel { label: d.class_count() - 1, classes: net.output_size() });
        }
    }
    let start = clock.seconds();
    let sizes = net.layer_sizes().to_vec();
    let batch = config.batch_size.min(train_set.len());
    let mut acts = Activations::new(&sizes, batch);
    let mut scratch = Backprop::new(&sizes, batch);
    let mut grads = Gradients::zeros_like(&net);
    let mut state = OptimizerState::new(config, &net);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut rng = SplitMix64::new(derive_seed(config.seed, SHUFFLE_STREAM));
    let mut labels = Vec::with_capacity(batch);
    let mut report = TrainReport {
        train_loss: Vec::with_capacity(config.epochs),
        validation_accuracy: Vec::with_capacity(config.epochs),
        best_validation_accuracy: 0.0,
        wall_seconds: 0.0,
    };

    for _ in 0..config.epochs {
        rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(batch) {
            acts.resize(&sizes, chunk.len());
            scratch.resize(&sizes, chunk.len());
            labels.clear();
            for (b, &i) in chunk.iter().enumerate() {
                acts.load_row(b, train_set.input(i));
                labels.push(train_set.label(i));
            }
            let ce = net.step_gradients(&mut acts, &labels, &mut scratch, &mut grads);
            loss_sum += ce * chunk.len() as f64;
            if config.l2_coefficient != 0.0 {
                add_l2(&mut grads, &net.weights, config.l2_coefficient);
            }
            state.step(&mut net, &grads);
        }
        report.train_loss.push(loss_sum / train_set.len() as f64);
        let acc = evaluate(&net, validation)?;
        report.validation_accuracy.push(acc);
        if acc > report.best_validation_accuracy {
            report.best_validation_accuracy = acc;
        }
    }
    report.wall_seconds = clock.seconds() - start;
    Ok((net, report))
}

/// Fraction of rows whose most probable class equals the label.
pub fn evaluate(net: &SparseNet, dataset: &Dataset) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if dataset.dim() != net.input_size() {
        return Err(Error::DimensionMismatch { expected: net.input_size(), found: dataset.dim() });
    }
    let sizes = net.layer_sizes();
    let mut acts = Activations::new(sizes, 0);
    let mut correct = 0usize;
    let mut start = 0;
    while start < dataset.len() {
        let end = (start + EVAL_CHUNK).min(dataset.len());
        acts.resize(sizes, end - start);
        for i in start..end {
            acts.load_row(i - start, dataset.input(i));
        }
        net.forward_into(&mut acts);
        correct += (start..end).filter(|&i| acts.predicted_class(i - start) == dataset.label(i)).count();
        start = end;
    }
    Ok(correct as f64 / dataset.len() as f64)
}

enum OptimizerState {
    Sgd { lr: f64 },
    Adam { lr: f64, beta1: f64, beta2: f64, epsilon: f64, step: i32, m: Gradients, v: Gradients },
}

impl OptimizerState {
    fn new(config: &TrainConfig, net: &SparseNet) -> Self {
        match config.optimizer {
            Optimizer::Sgd => OptimizerState::Sgd { lr: config.learning_rate },
            Optimizer::Adam => OptimizerState::Adam {
                lr: config.learning_rate,
                beta1: config.adam_beta1,
                beta2: config.adam_beta2,
                epsilon: config.adam_epsilon,
                step: 0,
                m: Gradients::zeros_like(net),
                v: Gradients::zeros_like(net),
            },
        }
    }

    fn step(&mut self, net: &mut SparseNet, grads: &Gradients) {
        let params = net.weights.iter_mut().chain(net.biases.iter_mut());
        let gs = grads.weights.iter().chain(&grads.biases);
        match self {
            OptimizerState::Sgd { lr } => {
                for (p, g) in params.zip(gs) {
                    for (p, &g) in p.iter_mut().zip(g) {
                        *p -= *lr * g;
                    }
                }
            }
            OptimizerState::Adam { lr, beta1, beta2, epsilon, step, m, v } => {
                *step += 1;
                let c1 = 1.0 - libm::pow(*beta1, *step as f64);
                let c2 = 1.0 - libm::pow(*beta2, *step as f64);
                let ms = m.weights.iter_mut().chain(m.biases.iter_mut());
                let vs = v.weights.iter_mut().chain(v.biases.iter_mut());
                for (((p, g), m), v) in params.zip(gs).zip(ms).zip(vs) {
                    for (((p, &g), m), v) in p.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut()) {
                        *m = *beta1 * *m + (1.0 - *beta1) * g;
                        *v = *beta2 * *v + (1.0 - *beta2) * g * g;
                        *p -= *lr * (*m / c1) / (libm::sqrt(*v / c2) + *epsilon);
                    }
                }
            }
        }
    }
}
