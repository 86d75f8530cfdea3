//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use sparsenet_core::net::SparseNet;
use sparsenet_core::rng::SplitMix64;
use sparsenet_core::topology::{AdjacencyMatrix, ConnectionPattern, GeneratorTag, NetworkTopology};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Log-uniform size in `[1, max]`.
pub fn random_size(rng: &mut SplitMix64, max: usize) -> usize {
    let bits = (max as f64).log2();
    (2f64.powf(rng.next_f64() * bits).round() as usize).clamp(1, max)
}

/// Random feasible fan-out for a junction, keeping `n_left * fo <= max_weights`
/// whenever some feasible fan-out allows it.
pub fn random_fan_out(rng: &mut SplitMix64, n_left: usize, n_right: usize, max_weights: usize) -> usize {
    // fi = n_left * fo / n_right is integral iff fo is a multiple of n_right / g.
    let step = n_right / gcd(n_left, n_right);
    let choices = n_right / step;
    let cap = (max_weights / (n_left * step)).clamp(1, choices);
    step * (1 + rng.below(cap))
}

/// Random topology with `1..=max_junctions` junctions and layers up to `max_size`.
pub fn random_topology(rng: &mut SplitMix64, max_junctions: usize, max_size: usize, max_weights: usize) -> NetworkTopology {
    let junctions = 1 + rng.below(max_junctions);
    let layers: Vec<usize> = (0..=junctions).map(|_| random_size(rng, max_size)).collect();
    let fan_outs: Vec<usize> = layers.windows(2).map(|w| random_fan_out(rng, w[0], w[1], max_weights)).collect();
    NetworkTopology::new(&layers, &fan_outs).expect("sampled fan-outs are feasible")
}

/// Dense 0/1 matrix of junction `i`, `[right][left]`, straight from the edge list.
pub fn dense_junction(pattern: &ConnectionPattern, i: usize) -> Vec<Vec<u64>> {
    let spec = pattern.topology().junction(i);
    let mut m = vec![vec![0u64; spec.n_left()]; spec.n_right()];
    for (left, right) in pattern.edges(i) {
        m[right][left] += 1;
    }
    m
}

/// Number of paths from neuron `from` in layer `first` to every neuron of
/// layer `last + 1`, by depth-first enumeration.
pub fn count_paths(pattern: &ConnectionPattern, first: usize, last: usize, from: usize) -> Vec<u64> {
    let successors: Vec<Vec<Vec<usize>>> = (first..=last)
        .map(|i| {
            let spec = pattern.topology().junction(i);
            let mut out = vec![Vec::new(); spec.n_left()];
            for (left, right) in pattern.edges(i) {
                out[left].push(right);
            }
            out
        })
        .collect();
    let n_end = pattern.topology().layer_sizes()[last + 1];
    let mut counts = vec![0u64; n_end];
    let mut stack = vec![(0usize, from)];
    while let Some((depth, node)) = stack.pop() {
        if depth == successors.len() {
            counts[node] += 1;
            continue;
        }
        for &next in &successors[depth][node] {
            stack.push((depth + 1, next));
        }
    }
    counts
}

/// Masked dense MLP mirroring a [`SparseNet`]: same parameters, textbook loops.
pub struct DenseOracle {
    /// Per junction `[right][left]`, zero where no edge exists.
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Vec<Vec<f64>>,
}

/// Dense gradients; weight entries on absent edges are the would-be gradient.
pub struct DenseGradients {
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Vec<Vec<f64>>,
}

impl DenseOracle {
    pub fn from_net(net: &SparseNet) -> Self {
        let pattern = net.pattern();
        let weights = (0..pattern.topology().junction_count())
            .map(|i| {
                let spec = pattern.topology().junction(i);
                let mut w = vec![vec![0.0; spec.n_left()]; spec.n_right()];
                for ((left, right), &value) in pattern.edges(i).zip(&net.weights()[i]) {
                    w[right][left] = value;
                }
                w
            })
            .collect();
        DenseOracle { weights, biases: net.biases().to_vec() }
    }

    /// Pre-activations and activations of every layer for one sample.
    pub fn forward_one(&self, x: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut pre = vec![x.to_vec()];
        let mut act = vec![x.to_vec()];
        let last = self.weights.len() - 1;
        for (i, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let input = act.last().unwrap();
            let z: Vec<f64> = w.iter().zip(b).map(|(row, &bias)| row.iter().zip(input).fold(bias, |s, (&wv, &xv)| s + wv * xv)).collect();
            let a = if i == last {
                let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
                let s: f64 = e.iter().sum();
                e.iter().map(|v| v / s).collect()
            } else {
                z.iter().map(|&v| v.max(0.0)).collect()
            };
            pre.push(z);
            act.push(a);
        }
        (pre, act)
    }

    /// Mean cross-entropy plus `(l2/2) * sum(w^2)` and dense gradients.
    pub fn loss_and_gradients(&self, rows: &[f64], labels: &[usize], l2: f64) -> (f64, DenseGradients) {
        let dim = self.weights[0][0].len();
        let batch = labels.len();
        let mut gw: Vec<Vec<Vec<f64>>> = self.weights.iter().map(|w| vec![vec![0.0; w[0].len()]; w.len()]).collect();
        let mut gb: Vec<Vec<f64>> = self.biases.iter().map(|b| vec![0.0; b.len()]).collect();
        let mut loss = 0.0;
        for (s, &label) in labels.iter().enumerate() {
            let (pre, act) = self.forward_one(&rows[s * dim..(s + 1) * dim]);
            let probs = act.last().unwrap();
            loss -= probs[label].ln();
            let mut delta: Vec<f64> = probs.iter().enumerate().map(|(c, &p)| (p - if c == label { 1.0 } else { 0.0 }) / batch as f64).collect();
            for i in (0..self.weights.len()).rev() {
                for (j, &d) in delta.iter().enumerate() {
                    gb[i][j] += d;
                    for (k, &a) in act[i].iter().enumerate() {
                        gw[i][j][k] += d * a;
                    }
                }
                if i > 0 {
                    delta = (0..act[i].len())
                        .map(|k| if pre[i][k] > 0.0 { (0..delta.len()).map(|j| self.weights[i][j][k] * delta[j]).sum() } else { 0.0 })
                        .collect();
                }
            }
        }
        let mut penalty = 0.0;
        for (g, w) in gw.iter_mut().zip(&self.weights) {
            for (gr, wr) in g.iter_mut().zip(w) {
                for (gv, &wv) in gr.iter_mut().zip(wr) {
                    *gv += l2 * wv;
                    penalty += wv * wv;
                }
            }
        }
        (loss / batch as f64 + 0.5 * l2 * penalty, DenseGradients { weights: gw, biases: gb })
    }
}

/// `max |a - b| / max |b|` over two equally long sequences.
pub fn relative_error(a: impl IntoIterator<Item = f64>, b: impl IntoIterator<Item = f64>) -> f64 {
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (x, y) in a.into_iter().zip(b) {
        diff = diff.max((x - y).abs());
        scale = scale.max(y.abs());
    }
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub fn random_batch(rng: &mut SplitMix64, dim: usize, classes: usize, batch: usize) -> (Vec<f64>, Vec<usize>) {
    let inputs = (0..dim * batch).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let labels = (0..batch).map(|_| rng.below(classes)).collect();
    (inputs, labels)
}

/// Perturb biases away from zero so the bias path is exercised.
pub fn jitter_biases(net: &mut SparseNet, rng: &mut SplitMix64) {
    for layer in net.biases_mut() {
        for b in layer {
            *b = rng.uniform(-0.1, 0.1);
        }
    }
}

/// Worst relative error between `net` and the dense oracle over activations,
/// loss and gradients on a random batch.
pub fn check_against_oracle(net: &SparseNet, rng: &mut SplitMix64, batch: usize, l2: f64) -> f64 {
    let (inputs, labels) = random_batch(rng, net.input_size(), net.output_size(), batch);
    let oracle = DenseOracle::from_net(net);

    let acts = net.forward(&inputs).unwrap();
    let mut worst: f64 = 0.0;
    for s in 0..batch {
        let (_, dense) = oracle.forward_one(&inputs[s * net.input_size()..(s + 1) * net.input_size()]);
        worst = worst.max(relative_error(acts.probabilities(s), dense.last().unwrap().iter().copied()));
        for (layer, expected) in dense.iter().enumerate().take(acts.layer_count() - 1).skip(1) {
            worst = worst.max(relative_error(acts.sample(layer, s), expected.iter().copied()));
        }
    }

    let (loss, grads) = net.loss_and_gradients(&inputs, &labels, l2).unwrap();
    let (dense_loss, dense_grads) = oracle.loss_and_gradients(&inputs, &labels, l2);
    worst = worst.max(relative_error([loss], [dense_loss]));
    for i in 0..net.pattern().topology().junction_count() {
        let expected = net.pattern().edges(i).map(|(left, right)| dense_grads.weights[i][right][left]);
        worst = worst.max(relative_error(grads.weights[i].iter().copied(), expected));
        worst = worst.max(relative_error(grads.biases[i].iter().copied(), dense_grads.biases[i].iter().copied()));
    }
    worst
}

/// The (8,4,4) fo=(1,2) worked example: hidden neurons 0 and 3 draw both
/// inputs from one window, so S_1f = 6/8.
pub fn figure_example() -> ConnectionPattern {
    let topology = NetworkTopology::new(&[8, 4, 4], &[1, 2]).unwrap();
    let a1 = AdjacencyMatrix::from_edges(4, 8, &[(0, 0), (0, 1), (1, 2), (1, 4), (2, 3), (2, 5), (3, 6), (3, 7)]).unwrap();
    let a2 = AdjacencyMatrix::from_edges(4, 4, &[(0, 0), (0, 2), (1, 1), (1, 3), (2, 1), (2, 3), (3, 0), (3, 2)]).unwrap();
    ConnectionPattern::new(topology, vec![a1, a2], None, GeneratorTag::Explicit).unwrap()
}
