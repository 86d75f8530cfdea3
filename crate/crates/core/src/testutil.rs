//! Shared fixtures for unit tests.

use alloc::vec;

use crate::topology::{AdjacencyMatrix, ConnectionPattern, GeneratorTag, NetworkTopology};

/// An (8,4,4) network with fo = (1, 2) whose first junction has forward
/// scatter 6/8: hidden neurons 0 and 3 draw both inputs from one window.
/// Its scatter vector is `[0.75, 1, 1, 1, 0.75, 1]`.
pub fn small_example() -> ConnectionPattern {
    let topology = NetworkTopology::new(&[8, 4, 4], &[1, 2]).unwrap();
    let a1 = AdjacencyMatrix::from_edges(4, 8, &[(0, 0), (0, 1), (1, 2), (1, 4), (2, 3), (2, 5), (3, 6), (3, 7)])
        .unwrap();
    let a2 = AdjacencyMatrix::from_edges(4, 4, &[(0, 0), (0, 2), (1, 1), (1, 3), (2, 1), (2, 3), (3, 0), (3, 2)])
        .unwrap();
    ConnectionPattern::new(topology, vec![a1, a2], None, GeneratorTag::Explicit).unwrap()
}
