//! Junction specifications, density arithmetic and connection patterns.
//!
//! A network with `J` junctions has `J + 1` layers of sizes `N_1..N_{J+1}`.
//! Junction `i` joins a left layer of `N_i` neurons to a right layer of
//! `N_{i+1}` neurons; every left neuron has exactly `fan_out` edges and every
//! right neuron exactly `fan_in`, so `N_i * fan_out == N_{i+1} * fan_in`.

mod adjacency;
mod pattern;
mod random;
mod windowed;

use alloc::vec::Vec;

use crate::error::{Error, Result};

pub use adjacency::AdjacencyMatrix;
pub use pattern::{compose_adjacency, ConnectionPattern, GeneratorTag};
pub use random::{generate_random_pattern, random_biregular};
pub use windowed::{generate_windowed_pattern, Locality};

/// One junction with exact fan-out and fan-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JunctionSpec {
    n_left: usize,
    n_right: usize,
    fan_out: usize,
    fan_in: usize,
    weight_count: usize,
}

impl JunctionSpec {
    /// Derives the fan-in from the layer sizes and fan-out.
    pub fn new(n_left: usize, n_right: usize, fan_out: usize) -> Result<Self> {
        if n_left == 0 {
            return Err(Error::ZeroSize("left layer size"));
        }
        if n_right == 0 {
            return Err(Error::ZeroSize("right layer size"));
        }
        if fan_out == 0 {
            return Err(Error::ZeroSize("fan-out"));
        }
        if fan_out > n_right {
            return Err(Error::FanOutTooLarge { fan_out, n_right });
        }
        let weight_count = n_left * fan_out;
        if weight_count % n_right != 0 {
            return Err(Error::NonIntegralFanIn { n_left, n_right, fan_out });
        }
        let fan_in = weight_count / n_right;
        // fan_out <= n_right already implies this; kept for clarity of the invariant.
        if fan_in > n_left {
            return Err(Error::FanInTooLarge { fan_in, n_left });
        }
        Ok(JunctionSpec { n_left, n_right, fan_out, fan_in, weight_count })
    }

    /// Fully connected junction.
    pub fn dense(n_left: usize, n_right: usize) -> Result<Self> {
        Self::new(n_left, n_right, n_right)
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn fan_out(&self) -> usize {
        self.fan_out
    }

    pub fn fan_in(&self) -> usize {
        self.fan_in
    }

    pub fn weight_count(&self) -> usize {
        self.weight_count
    }

    /// Number of edges a fully connected junction would have.
    pub fn dense_count(&self) -> usize {
        self.n_left * self.n_right
    }

    pub fn is_dense(&self) -> bool {
        self.fan_out == self.n_right
    }

    /// `W_i / (N_i * N_{i+1})`.
    pub fn density(&self) -> f64 {
        self.weight_count as f64 / self.dense_count() as f64
    }
}

/// Free-function form of [`JunctionSpec::new`].
pub fn derive_junction_spec(n_left: usize, n_right: usize, fan_out: usize) -> Result<JunctionSpec> {
    JunctionSpec::new(n_left, n_right, fan_out)
}

pub fn junction_density(spec: &JunctionSpec) -> f64 {
    spec.density()
}

/// Total weights over total fully connected weights.
pub fn overall_cl_density(specs: &[JunctionSpec]) -> Result<f64> {
    if specs.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let (weights, dense) = weight_totals(specs);
    Ok(weights as f64 / dense as f64)
}

/// `(sum of W_i, sum of N_i * N_{i+1})`, for exact density comparisons.
pub fn weight_totals(specs: &[JunctionSpec]) -> (u64, u64) {
    specs.iter().fold((0u64, 0u64), |(w, d), s| {
        (w + s.weight_count() as u64, d + s.dense_count() as u64)
    })
}

/// Layer sizes plus one [`JunctionSpec`] per adjacent pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetworkTopology {
    layer_sizes: Vec<usize>,
    junctions: Vec<JunctionSpec>,
}

impl NetworkTopology {
    pub fn new(layer_sizes: &[usize], fan_outs: &[usize]) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::EmptyNetwork);
        }
        if fan_outs.len() != layer_sizes.len() - 1 {
            return Err(Error::LengthMismatch { left: layer_sizes.len() - 1, right: fan_outs.len() });
        }
        let junctions = layer_sizes
            .windows(2)
            .zip(fan_outs)
            .map(|(pair, &fo)| JunctionSpec::new(pair[0], pair[1], fo))
            .collect::<Result<Vec<_>>>()?;
        Ok(NetworkTopology { layer_sizes: layer_sizes.to_vec(), junctions })
    }

    /// Every junction fully connected.
    pub fn dense(layer_sizes: &[usize]) -> Result<Self> {
        let fan_outs: Vec<usize> = layer_sizes.iter().skip(1).copied().collect();
        Self::new(layer_sizes, &fan_outs)
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn junctions(&self) -> &[JunctionSpec] {
        &self.junctions
    }

    pub fn junction(&self, index: usize) -> &JunctionSpec {
        &self.junctions[index]
    }

    pub fn junction_count(&self) -> usize {
        self.junctions.len()
    }

    pub fn fan_outs(&self) -> Vec<usize> {
        self.junctions.iter().map(JunctionSpec::fan_out).collect()
    }

    pub fn fan_ins(&self) -> Vec<usize> {
        self.junctions.iter().map(JunctionSpec::fan_in).collect()
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().expect("at least two layers")
    }

    pub fn overall_density(&self) -> f64 {
        overall_cl_density(&self.junctions).expect("topology has junctions")
    }

    pub fn check_span(&self, first: usize, last: usize) -> Result<()> {
        let junctions = self.junction_count();
        if first > last || last >= junctions {
            return Err(Error::BadSpan { first, last, junctions });
        }
        Ok(())
    }

    /// Products of fan-outs and fan-ins over junctions `first..=last`.
    pub fn equivalent_fans(&self, first: usize, last: usize) -> Result<(u64, u64)> {
        equivalent_fans(self, first, last)
    }
}

/// `(prod fo_i, prod fi_i)` over the 0-based inclusive junction span.
pub fn equivalent_fans(topology: &NetworkTopology, first: usize, last: usize) -> Result<(u64, u64)> {
    topology.check_span(first, last)?;
    Ok(topology.junctions[first..=last].iter().fold((1u64, 1u64), |(fo, fi), j| {
        (fo.saturating_mul(j.fan_out() as u64), fi.saturating_mul(j.fan_in() as u64))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_small_example() {
        let s = derive_junction_spec(8, 4, 1).unwrap();
        assert_eq!((s.fan_in(), s.weight_count()), (2, 8));
        let s = derive_junction_spec(4, 4, 2).unwrap();
        assert_eq!((s.fan_in(), s.weight_count()), (2, 8));
    }

    #[test]
    fn derive_dense_and_wide() {
        for n in [1, 3, 17, 64] {
            let s = derive_junction_spec(n, n, n).unwrap();
            assert_eq!((s.fan_in(), s.weight_count()), (n, n * n));
            assert_eq!(s.density(), 1.0);
        }
        let s = derive_junction_spec(4096, 512, 1).unwrap();
        assert_eq!((s.fan_in(), s.weight_count()), (8, 4096));
    }

    #[test]
    fn derive_errors() {
        assert_eq!(
            derive_junction_spec(3, 2, 1),
            Err(Error::NonIntegralFanIn { n_left: 3, n_right: 2, fan_out: 1 })
        );
        assert_eq!(derive_junction_spec(8, 4, 5), Err(Error::FanOutTooLarge { fan_out: 5, n_right: 4 }));
        assert!(matches!(derive_junction_spec(0, 4, 1), Err(Error::ZeroSize(_))));
        assert!(matches!(derive_junction_spec(4, 4, 0), Err(Error::ZeroSize(_))));
    }

    #[test]
    fn junction_densities() {
        let d = junction_density(&derive_junction_spec(4096, 512, 1).unwrap());
        assert!((d - 1.0 / 512.0).abs() < 1e-15);
        assert!((d * 100.0 - 0.2).abs() < 0.005);
        let d = junction_density(&derive_junction_spec(512, 16, 1).unwrap());
        assert_eq!(d, 0.0625);
    }

    #[test]
    fn overall_densities() {
        let specs = [derive_junction_spec(4096, 512, 1).unwrap(), derive_junction_spec(512, 16, 1).unwrap()];
        let d = overall_cl_density(&specs).unwrap();
        assert_eq!(d, 4608.0 / 2_105_344.0);
        assert!((d * 100.0 - 0.22).abs() < 0.005);

        let morse = [derive_junction_spec(64, 1024, 512).unwrap(), derive_junction_spec(1024, 64, 32).unwrap()];
        assert_eq!(overall_cl_density(&morse).unwrap(), 0.5);

        let dense = NetworkTopology::dense(&[5, 7, 3]).unwrap();
        assert_eq!(dense.overall_density(), 1.0);
        assert_eq!(overall_cl_density(&[]), Err(Error::EmptyNetwork));
    }

    #[test]
    fn table_rows() {
        // MNIST CL x=224 rows: fan-outs (4,10) and (112,10).
        let t = NetworkTopology::new(&[784, 224, 10], &[4, 10]).unwrap();
        let d: Vec<f64> = t.junctions().iter().map(|j| j.density() * 100.0).collect();
        assert!((d[0] - 1.79).abs() < 0.005 && d[1] == 100.0);
        assert!((t.overall_density() * 100.0 - 3.02).abs() < 0.005);
        let t = NetworkTopology::new(&[784, 224, 10], &[112, 10]).unwrap();
        assert!((t.overall_density() * 100.0 - 50.63).abs() < 0.005);
    }

    #[test]
    fn overall_is_weighted_mean() {
        let t = NetworkTopology::new(&[64, 1024, 64], &[128, 32]).unwrap();
        let weighted: f64 = t.junctions().iter().map(|j| j.density() * j.dense_count() as f64).sum::<f64>()
            / t.junctions().iter().map(|j| j.dense_count() as f64).sum::<f64>();
        assert!((weighted - t.overall_density()).abs() < 1e-15);
    }

    #[test]
    fn fans_over_spans() {
        let t = NetworkTopology::new(&[8, 4, 4], &[1, 2]).unwrap();
        assert_eq!(equivalent_fans(&t, 0, 1).unwrap(), (2, 4));
        assert_eq!(equivalent_fans(&t, 1, 1).unwrap(), (2, 2));
        let morse = NetworkTopology::new(&[64, 1024, 64], &[128, 8]).unwrap();
        assert_eq!(equivalent_fans(&morse, 0, 1).unwrap(), (1024, 1024));
        assert!(matches!(equivalent_fans(&t, 1, 0), Err(Error::BadSpan { .. })));
        assert!(matches!(equivalent_fans(&t, 0, 2), Err(Error::BadSpan { .. })));
    }

    #[test]
    fn topology_shape_checks() {
        assert_eq!(NetworkTopology::new(&[4], &[]), Err(Error::EmptyNetwork));
        assert!(matches!(NetworkTopology::new(&[4, 4], &[1, 1]), Err(Error::LengthMismatch { .. })));
    }
}
