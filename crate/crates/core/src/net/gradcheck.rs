//! Analytic gradients against central finite differences.

use alloc::vec::Vec;

use super::SparseNet;
use crate::error::Result;
use crate::rng::SplitMix64;

/// Central-difference step.
pub const STEP: f64 = 1e-5;

/// Gradients smaller than this are compared in absolute rather than relative
/// terms, since central differences carry a few `1e-11` of rounding noise.
pub const FLOOR: f64 = 1e-5;

/// L2 coefficient used by [`gradient_check`], so the penalty term is covered.
const CHECK_L2: f64 = 1e-3;

/// Random samples with a hidden pre-activation closer than this to zero are
/// redrawn: a step across the ReLU kink breaks the central difference.
const KINK_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// Flattened parameter index with the largest error.
    pub worst_index: usize,
    pub parameters: usize,
    pub pass: bool,
}

/// `|a - n| / max(|a|, |n|, FLOOR)`, maximised over parameters.
pub fn compare_gradients(analytic: &[f64], numeric: &[f64], tolerance: f64) -> GradCheckReport {
    assert_eq!(analytic.len(), numeric.len(), "gradient lengths differ");
    let mut worst = (0.0, 0);
    for (k, (&a, &n)) in analytic.iter().zip(numeric).enumerate() {
        let err = (a - n).abs() / a.abs().max(n.abs()).max(FLOOR);
        if err > worst.0 || err.is_nan() {
            worst = (err, k);
        }
    }
    GradCheckReport { max_rel_error: worst.0, worst_index: worst.1, parameters: analytic.len(), pass: worst.0 <= tolerance }
}

/// Central differences of the loss for every parameter, in flattened order.
pub fn numeric_gradients(net: &SparseNet, inputs: &[f64], labels: &[usize], l2: f64, step: f64) -> Result<Vec<f64>> {
    let mut probe = net.clone();
    let mut out = Vec::with_capacity(net.parameter_count());
    for k in 0..net.parameter_count() {
        let original = *probe.parameter_mut(k);
        *probe.parameter_mut(k) = original + step;
        let up = probe.loss(inputs, labels, l2)?;
        *probe.parameter_mut(k) = original - step;
        let down = probe.loss(inputs, labels, l2)?;
        *probe.parameter_mut(k) = original;
        out.push((up - down) / (2.0 * step));
    }
    Ok(out)
}

pub fn gradient_check_on(net: &SparseNet, inputs: &[f64], labels: &[usize], l2: f64, tolerance: f64) -> Result<GradCheckReport> {
    let (_, grads) = net.loss_and_gradients(inputs, labels, l2)?;
    let numeric = numeric_gradients(net, inputs, labels, l2, STEP)?;
    Ok(compare_gradients(&grads.flatten(), &numeric, tolerance))
}

/// Smallest `|z|` over the hidden pre-activations of one sample.
fn nearest_kink(net: &SparseNet, input: &[f64]) -> f64 {
    let mut nearest = f64::INFINITY;
    let mut layer = input.to_vec();
    let junctions = net.weights().len();
    for i in 0..junctions - 1 {
        let fan_in = net.pattern().topology().junction(i).fan_in();
        let next: Vec<f64> = net.biases()[i]
            .iter()
            .enumerate()
            .map(|(j, &b)| {
                let edges = j * fan_in..(j + 1) * fan_in;
                let z = net.weights()[i][edges.clone()].iter().zip(&net.sources(i)[edges]).fold(b, |acc, (&w, &s)| acc + w * layer[s as usize]);
                nearest = nearest.min(z.abs());
                z.max(0.0)
            })
            .collect();
        layer = next;
    }
    nearest
}

/// Checks every parameter on `n_samples` random inputs in `[-1, 1]` with
/// random labels drawn from `seed`. Samples sitting near a ReLU kink are
/// redrawn.
pub fn gradient_check(net: &SparseNet, n_samples: usize, tolerance: f64, seed: u64) -> Result<GradCheckReport> {
    let mut rng = SplitMix64::new(seed);
    let dim = net.input_size();
    let mut inputs: Vec<f64> = Vec::with_capacity(n_samples * dim);
    for _ in 0..n_samples {
        let mut row: Vec<f64> = (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
        for _ in 0..100 {
            if nearest_kink(net, &row) >= KINK_MARGIN {
                break;
            }
            row.iter_mut().for_each(|x| *x = rng.uniform(-1.0, 1.0));
        }
        inputs.extend_from_slice(&row);
    }
    let labels: Vec<usize> = (0..n_samples).map(|_| rng.below(net.output_size())).collect();
    gradient_check_on(net, &inputs, &labels, CHECK_L2, tolerance)
}
