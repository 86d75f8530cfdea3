//! Sparse multilayer perceptron over a fixed connection pattern.
//!
//! Only existing edges carry a weight. Weights of junction `i` are stored in
//! the pattern's canonical edge order (by right neuron, then left neuron), so
//! right neuron `j` owns the contiguous slice `[j * fi, (j + 1) * fi)`.
//!
//! Batches are processed neuron-major: the activations of one neuron across
//! the whole batch sit next to each other, which turns every edge into a
//! vector axpy (forward) or dot product (weight gradient).

mod gradcheck;
mod train;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::topology::ConnectionPattern;

pub use gradcheck::{compare_gradients, gradient_check, gradient_check_on, numeric_gradients, GradCheckReport};
pub use train::{evaluate, train, train_split, Clock, NoClock, Optimizer, TrainConfig, TrainReport};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseNet {
    pattern: ConnectionPattern,
    sources: Vec<Vec<u32>>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

/// Parameter-shaped buffer: one weight list per junction plus one bias list
/// per non-input layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &SparseNet) -> Self {
        Gradients {
            weights: net.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: net.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    /// Junction by junction: weights, then that junction's right-layer biases.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }
}

fn sources_of(pattern: &ConnectionPattern) -> Vec<Vec<u32>> {
    (0..pattern.topology().junction_count()).map(|i| pattern.edges(i).map(|(left, _)| left as u32).collect()).collect()
}

impl SparseNet {
    /// Uniform weights in `±sqrt(6 / (fi + fo))` per junction, zero biases.
    pub fn init(pattern: ConnectionPattern, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let topology = pattern.topology();
        let weights = topology
            .junctions()
            .iter()
            .map(|j| {
                let limit = libm::sqrt(6.0 / (j.fan_in() + j.fan_out()) as f64);
                (0..j.weight_count()).map(|_| rng.uniform(-limit, limit)).collect()
            })
            .collect();
        let biases = topology.layer_sizes()[1..].iter().map(|&n| vec![0.0; n]).collect();
        let sources = sources_of(&pattern);
        SparseNet { pattern, sources, weights, biases }
    }

    pub fn from_parts(pattern: ConnectionPattern, weights: Vec<Vec<f64>>, biases: Vec<Vec<f64>>) -> Result<Self> {
        let topology = pattern.topology();
        if weights.len() != topology.junction_count() || biases.len() != topology.junction_count() {
            return Err(Error::LengthMismatch { left: weights.len(), right: biases.len() });
        }
        for (i, j) in topology.junctions().iter().enumerate() {
            if weights[i].len() != j.weight_count() {
                return Err(Error::DimensionMismatch { expected: j.weight_count(), found: weights[i].len() });
            }
            if biases[i].len() != j.n_right() {
                return Err(Error::DimensionMismatch { expected: j.n_right(), found: biases[i].len() });
            }
        }
        let sources = sources_of(&pattern);
        Ok(SparseNet { pattern, sources, weights, biases })
    }

    pub fn pattern(&self) -> &ConnectionPattern {
        &self.pattern
    }

    pub fn layer_sizes(&self) -> &[usize] {
        self.pattern.topology().layer_sizes()
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes()[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes().last().unwrap()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.biases
    }

    /// Left neuron of each edge of junction `i`, aligned with `weights()[i]`.
    pub fn sources(&self, i: usize) -> &[u32] {
        &self.sources[i]
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.iter().chain(&self.biases).map(Vec::len).sum()
    }

    /// Parameters in the same order as [`Gradients::flatten`].
    pub fn parameters(&self) -> Vec<f64> {
        Gradients { weights: self.weights.clone(), biases: self.biases.clone() }.flatten()
    }

    pub fn parameter_mut(&mut self, mut index: usize) -> &mut f64 {
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            if index < w.len() {
                return &mut w[index];
            }
            index -= w.len();
            if index < b.len() {
                return &mut b[index];
            }
            index -= b.len();
        }
        panic!("parameter index out of range");
    }

    pub fn forward(&self, inputs: &[f64]) -> Result<Activations> {
        let batch = self.batch_size_of(inputs)?;
        let mut acts = Activations::new(self.layer_sizes(), batch);
        acts.load_rows(inputs, self.input_size());
        self.forward_into(&mut acts);
        Ok(acts)
    }

    /// Mean cross-entropy plus `(l2 / 2) * sum(w^2)` over weights, and its
    /// gradient.
    pub fn loss_and_gradients(&self, inputs: &[f64], labels: &[usize], l2: f64) -> Result<(f64, Gradients)> {
        let batch = self.batch_size_of(inputs)?;
        self.check_labels(labels, batch)?;
        let mut acts = Activations::new(self.layer_sizes(), batch);
        acts.load_rows(inputs, self.input_size());
        let mut scratch = Backprop::new(self.layer_sizes(), batch);
        let mut grads = Gradients::zeros_like(self);
        let ce = self.step_gradients(&mut acts, labels, &mut scratch, &mut grads);
        let loss = ce + 0.5 * l2 * self.weight_square_sum();
        if l2 != 0.0 {
            add_l2(&mut grads, &self.weights, l2);
        }
        Ok((loss, grads))
    }

    /// Loss only; same definition as [`SparseNet::loss_and_gradients`].
    pub fn loss(&self, inputs: &[f64], labels: &[usize], l2: f64) -> Result<f64> {
        let batch = self.batch_size_of(inputs)?;
        self.check_labels(labels, batch)?;
        let acts = self.forward(inputs)?;
        let ce = cross_entropy(acts.output_neuron_major(), labels, batch);
        Ok(ce + 0.5 * l2 * self.weight_square_sum())
    }

    fn weight_square_sum(&self) -> f64 {
        self.weights.iter().flatten().map(|w| w * w).sum()
    }

    fn batch_size_of(&self, inputs: &[f64]) -> Result<usize> {
        let n = self.input_size();
        if inputs.len() % n != 0 {
            return Err(Error::DimensionMismatch { expected: n * (inputs.len() / n + 1), found: inputs.len() });
        }
        Ok(inputs.len() / n)
    }

    fn check_labels(&self, labels: &[usize], batch: usize) -> Result<()> {
        if labels.len() != batch {
            return Err(Error::LengthMismatch { left: batch, right: labels.len() });
        }
        let classes = self.output_size();
        match labels.iter().find(|&&l| l >= classes) {
            Some(&label) => Err(Error::BadLabel { label, classes }),
            None => Ok(()),
        }
    }

    /// Runs the forward pass on the input layer already loaded in `acts`.
    fn forward_into(&self, acts: &mut Activations) {
        let batch = acts.batch;
        let junctions = self.weights.len();
        for i in 0..junctions {
            let (lower, upper) = acts.layers.split_at_mut(i + 1);
            let left = &lower[i];
            let right = &mut upper[0];
            let fan_in = self.pattern.topology().junction(i).fan_in();
            let weights = &self.weights[i];
            let sources = &self.sources[i];
            for (j, out) in right.chunks_exact_mut(batch).enumerate() {
                out.fill(self.biases[i][j]);
                let edges = j * fan_in..(j + 1) * fan_in;
                for (&w, &src) in weights[edges.clone()].iter().zip(&sources[edges]) {
                    let a = &left[src as usize * batch..(src as usize + 1) * batch];
                    for (o, &x) in out.iter_mut().zip(a) {
                        *o += w * x;
                    }
                }
                if i + 1 < junctions {
                    for o in out.iter_mut() {
                        if *o < 0.0 {
                            *o = 0.0;
                        }
                    }
                }
            }
        }
        softmax_columns(acts.layers.last_mut().unwrap(), batch);
    }

    /// Forward and backward over a loaded batch. Writes the data-term
    /// gradient into `grads` and returns the mean cross-entropy.
    fn step_gradients(&self, acts: &mut Activations, labels: &[usize], scratch: &mut Backprop, grads: &mut Gradients) -> f64 {
        self.forward_into(acts);
        let batch = acts.batch;
        let probs = acts.layers.last().unwrap();
        let ce = cross_entropy(probs, labels, batch);

        let inv = 1.0 / batch as f64;
        let top = scratch.deltas.last_mut().unwrap();
        for (d, &p) in top.iter_mut().zip(probs.iter()) {
            *d = p * inv;
        }
        for (b, &l) in labels.iter().enumerate() {
            top[l * batch + b] -= inv;
        }

        for i in (0..self.weights.len()).rev() {
            let fan_in = self.pattern.topology().junction(i).fan_in();
            let (lower, upper) = scratch.deltas.split_at_mut(i + 1);
            let delta_right = &upper[0];
            let delta_left = &mut lower[i];
            let left = &acts.layers[i];
            let propagate = i > 0;
            if propagate {
                delta_left.fill(0.0);
            }
            let weights = &self.weights[i];
            let sources = &self.sources[i];
            let grad_w = &mut grads.weights[i];
            for (j, d) in delta_right.chunks_exact(batch).enumerate() {
                grads.biases[i][j] = d.iter().sum();
                for e in j * fan_in..(j + 1) * fan_in {
                    let src = sources[e] as usize * batch;
                    let a = &left[src..src + batch];
                    grad_w[e] = d.iter().zip(a).map(|(x, y)| x * y).sum();
                    if propagate {
                        let w = weights[e];
                        for (dl, &dr) in delta_left[src..src + batch].iter_mut().zip(d) {
                            *dl += w * dr;
                        }
                    }
                }
            }
            if propagate {
                for (dl, &a) in delta_left.iter_mut().zip(left.iter()) {
                    if a <= 0.0 {
                        *dl = 0.0;
                    }
                }
            }
        }
        ce
    }
}

pub fn init_net(pattern: ConnectionPattern, seed: u64) -> SparseNet {
    SparseNet::init(pattern, seed)
}

fn add_l2(grads: &mut Gradients, weights: &[Vec<f64>], l2: f64) {
    for (g, w) in grads.weights.iter_mut().zip(weights) {
        for (g, &w) in g.iter_mut().zip(w) {
            *g += l2 * w;
        }
    }
}

fn softmax_columns(z: &mut [f64], batch: usize) {
    let classes = z.len() / batch;
    for b in 0..batch {
        let mut max = f64::NEG_INFINITY;
        for c in 0..classes {
            max = max.max(z[c * batch + b]);
        }
        let mut sum = 0.0;
        for c in 0..classes {
            let e = libm::exp(z[c * batch + b] - max);
            z[c * batch + b] = e;
            sum += e;
        }
        for c in 0..classes {
            z[c * batch + b] /= sum;
        }
    }
}

fn cross_entropy(probs: &[f64], labels: &[usize], batch: usize) -> f64 {
    let total: f64 = labels.iter().enumerate().map(|(b, &l)| -libm::log(probs[l * batch + b].max(f64::MIN_POSITIVE))).sum();
    total / batch as f64
}

/// Per-layer activations of one batch. Hidden layers hold post-ReLU values,
/// the last layer holds softmax probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Activations {
    batch: usize,
    layers: Vec<Vec<f64>>,
}

impl Activations {
    fn new(layer_sizes: &[usize], batch: usize) -> Self {
        Activations { batch, layers: layer_sizes.iter().map(|&n| vec![0.0; n * batch]).collect() }
    }

    fn resize(&mut self, layer_sizes: &[usize], batch: usize) {
        self.batch = batch;
        for (layer, &n) in self.layers.iter_mut().zip(layer_sizes) {
            layer.resize(n * batch, 0.0);
        }
    }

    fn load_rows(&mut self, rows: &[f64], dim: usize) {
        let batch = self.batch;
        let layer = &mut self.layers[0];
        for (b, row) in rows.chunks_exact(dim).enumerate() {
            for (n, &x) in row.iter().enumerate() {
                layer[n * batch + b] = x;
            }
        }
    }

    fn load_row(&mut self, b: usize, row: &[f64]) {
        let batch = self.batch;
        for (n, &x) in row.iter().enumerate() {
            self.layers[0][n * batch + b] = x;
        }
    }

    pub fn batch_size(&self) -> usize {
        self.batch
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Values of layer `layer` for sample `sample`.
    pub fn sample(&self, layer: usize, sample: usize) -> Vec<f64> {
        self.layers[layer].iter().skip(sample).step_by(self.batch).copied().collect()
    }

    pub fn probabilities(&self, sample: usize) -> Vec<f64> {
        self.sample(self.layers.len() - 1, sample)
    }

    /// Index of the largest output, ties to the lowest index.
    pub fn predicted_class(&self, sample: usize) -> usize {
        let out = self.output_neuron_major();
        let classes = out.len() / self.batch;
        let mut best = 0;
        for c in 1..classes {
            if out[c * self.batch + sample] > out[best * self.batch + sample] {
                best = c;
            }
        }
        best
    }

    fn output_neuron_major(&self) -> &[f64] {
        self.layers.last().unwrap()
    }
}

struct Backprop {
    deltas: Vec<Vec<f64>>,
}

impl Backprop {
    fn new(layer_sizes: &[usize], batch: usize) -> Self {
        Backprop { deltas: layer_sizes.iter().map(|&n| vec![0.0; n * batch]).collect() }
    }

    fn resize(&mut self, layer_sizes: &[usize], batch: usize) {
        for (d, &n) in self.deltas.iter_mut().zip(layer_sizes) {
            d.resize(n * batch, 0.0);
        }
    }
}
