use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{AdjacencyMatrix, NetworkTopology};
use crate::error::{Error, Result};

/// How a pattern was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorTag {
    Random,
    Windowed,
    Explicit,
}

impl GeneratorTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            GeneratorTag::Random => "random",
            GeneratorTag::Windowed => "windowed",
            GeneratorTag::Explicit => "explicit",
        }
    }
}

impl fmt::Display for GeneratorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(GeneratorTag::Random),
            "windowed" => Ok(GeneratorTag::Windowed),
            "explicit" => Ok(GeneratorTag::Explicit),
            _ => Err(Error::InvalidConfig("unknown generator tag")),
        }
    }
}

/// A topology plus one {0,1} adjacency matrix per junction.
///
/// Construction checks that every matrix is simple and has exactly `fan_in`
/// ones per row and `fan_out` ones per column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConnectionPattern {
    topology: NetworkTopology,
    adjacency: Vec<AdjacencyMatrix>,
    seed: Option<u64>,
    tag: GeneratorTag,
}

impl ConnectionPattern {
    pub fn new(
        topology: NetworkTopology,
        adjacency: Vec<AdjacencyMatrix>,
        seed: Option<u64>,
        tag: GeneratorTag,
    ) -> Result<Self> {
        if adjacency.len() != topology.junction_count() {
            return Err(Error::LengthMismatch { left: topology.junction_count(), right: adjacency.len() });
        }
        for (spec, a) in topology.junctions().iter().zip(&adjacency) {
            if a.rows() != spec.n_right() || a.cols() != spec.n_left() {
                return Err(Error::InvalidPattern("adjacency shape does not match the junction"));
            }
            if !a.is_binary() {
                return Err(Error::InvalidPattern("adjacency entries must be 0 or 1"));
            }
            if a.row_sums().iter().any(|&s| s != spec.fan_in() as u64) {
                return Err(Error::InvalidPattern("row sum differs from fan-in"));
            }
            if a.col_sums().iter().any(|&s| s != spec.fan_out() as u64) {
                return Err(Error::InvalidPattern("column sum differs from fan-out"));
            }
        }
        Ok(ConnectionPattern { topology, adjacency, seed, tag })
    }

    /// Fully connected pattern for `topology`'s layer sizes.
    pub fn dense(layer_sizes: &[usize]) -> Result<Self> {
        let topology = NetworkTopology::dense(layer_sizes)?;
        let adjacency = topology
            .junctions()
            .iter()
            .map(|j| {
                let rows = (0..j.n_right()).map(|_| (0..j.n_left() as u32).collect()).collect();
                AdjacencyMatrix::from_rows(j.n_left(), rows)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(topology, adjacency, None, GeneratorTag::Explicit)
    }

    pub fn topology(&self) -> &NetworkTopology {
        &self.topology
    }

    pub fn adjacency(&self) -> &[AdjacencyMatrix] {
        &self.adjacency
    }

    pub fn junction_adjacency(&self, index: usize) -> &AdjacencyMatrix {
        &self.adjacency[index]
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn tag(&self) -> GeneratorTag {
        self.tag
    }

    /// Edges of junction `index` as `(left, right)` in canonical order:
    /// ascending by right neuron, then by left neuron.
    pub fn edges(&self, index: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency[index].iter().map(|(right, left, _)| (left, right))
    }

    /// `A_{first:last} = A_last * ... * A_first` over a 0-based inclusive span.
    pub fn compose(&self, first: usize, last: usize) -> Result<AdjacencyMatrix> {
        self.topology.check_span(first, last)?;
        let mut acc = self.adjacency[first].clone();
        for a in &self.adjacency[first + 1..=last] {
            acc = a.matmul(&acc)?;
        }
        Ok(acc)
    }
}

/// Free-function form of [`ConnectionPattern::compose`].
pub fn compose_adjacency(pattern: &ConnectionPattern, first: usize, last: usize) -> Result<AdjacencyMatrix> {
    pattern.compose(first, last)
}
