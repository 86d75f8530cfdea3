//! Windows, window adjacency matrices and the scatter metric.
//!
//! For junction `i` the left layer is cut into `fan_in` contiguous windows
//! and the right layer into `fan_out` windows. Summing adjacency entries
//! over each window gives the left-window matrix (`N_{i+1} x fan_in`) and
//! the right-window matrix (`fan_out x N_i`). Forward scatter is the
//! fraction of non-zero entries in the left-window matrix, backward scatter
//! the fraction in the right-window matrix. Entries above one count once.
//!
//! The same construction applied to the composed matrix of the whole
//! network, with the products of fans as window counts, yields the overall
//! `S_f` and `S_b`. When a window count exceeds the layer size the windows
//! clamp to single neurons.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::topology::{AdjacencyMatrix, ConnectionPattern};

/// Equal contiguous windows over a layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowPartition {
    layer_size: usize,
    window_count: usize,
    neurons_per_window: usize,
}

impl WindowPartition {
    pub fn layer_size(&self) -> usize {
        self.layer_size
    }

    /// Effective number of windows (after clamping).
    pub fn window_count(&self) -> usize {
        self.window_count
    }

    pub fn neurons_per_window(&self) -> usize {
        self.neurons_per_window
    }

    pub fn window_of(&self, neuron: usize) -> usize {
        neuron / self.neurons_per_window
    }
}

/// Partition `layer_size` neurons into `requested` windows.
///
/// Requests at or above the layer size give one neuron per window. Smaller
/// requests must divide the layer exactly.
pub fn make_partition(layer_size: usize, requested: u64) -> Result<WindowPartition> {
    if layer_size == 0 {
        return Err(Error::ZeroSize("layer size"));
    }
    if requested == 0 {
        return Err(Error::ZeroSize("window count"));
    }
    if requested >= layer_size as u64 {
        return Ok(WindowPartition { layer_size, window_count: layer_size, neurons_per_window: 1 });
    }
    let requested = requested as usize;
    if layer_size % requested != 0 {
        return Err(Error::NonIntegralWindow { layer_size, windows: requested });
    }
    Ok(WindowPartition { layer_size, window_count: requested, neurons_per_window: layer_size / requested })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Rows are right neurons, columns are left windows.
    Left,
    /// Rows are right windows, columns are left neurons.
    Right,
}

/// Dense row-major window adjacency matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowAdjacency {
    side: Side,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl WindowAdjacency {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().sum()
    }

    pub fn nonzero(&self) -> u64 {
        self.entries.iter().filter(|&&e| e >= 1).count() as u64
    }
}

/// Sums the columns of `a` within each left window.
pub fn left_window_adjacency(a: &AdjacencyMatrix, windows: &WindowPartition) -> Result<WindowAdjacency> {
    if windows.layer_size() != a.cols() {
        return Err(Error::DimensionMismatch { expected: a.cols(), found: windows.layer_size() });
    }
    let cols = windows.window_count();
    let mut entries = vec![0u64; a.rows() * cols];
    for (r, c, v) in a.iter() {
        entries[r * cols + windows.window_of(c)] += v;
    }
    Ok(WindowAdjacency { side: Side::Left, rows: a.rows(), cols, entries })
}

/// Sums the rows of `a` within each right window.
pub fn right_window_adjacency(a: &AdjacencyMatrix, windows: &WindowPartition) -> Result<WindowAdjacency> {
    if windows.layer_size() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: windows.layer_size() });
    }
    let cols = a.cols();
    let mut entries = vec![0u64; windows.window_count() * cols];
    for (r, c, v) in a.iter() {
        entries[windows.window_of(r) * cols + c] += v;
    }
    Ok(WindowAdjacency { side: Side::Right, rows: windows.window_count(), cols, entries })
}

fn fraction_reached(w: &WindowAdjacency) -> f64 {
    w.nonzero() as f64 / (w.rows * w.cols) as f64
}

/// Fraction of (right neuron, left window) pairs joined by at least one edge or path.
pub fn scatter_forward(w: &WindowAdjacency, window_count: usize, n_right: usize) -> Result<f64> {
    if w.side != Side::Left {
        return Err(Error::InvalidConfig("forward scatter needs a left-window matrix"));
    }
    if w.rows != n_right {
        return Err(Error::DimensionMismatch { expected: n_right, found: w.rows });
    }
    if w.cols != window_count {
        return Err(Error::DimensionMismatch { expected: window_count, found: w.cols });
    }
    Ok(fraction_reached(w))
}

/// Fraction of (right window, left neuron) pairs joined by at least one edge or path.
pub fn scatter_backward(w: &WindowAdjacency, window_count: usize, n_left: usize) -> Result<f64> {
    if w.side != Side::Right {
        return Err(Error::InvalidConfig("backward scatter needs a right-window matrix"));
    }
    if w.rows != window_count {
        return Err(Error::DimensionMismatch { expected: window_count, found: w.rows });
    }
    if w.cols != n_left {
        return Err(Error::DimensionMismatch { expected: n_left, found: w.cols });
    }
    Ok(fraction_reached(w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

/// Which entry of a [`ScatterVector`] a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScatterLabel {
    /// Single junction, 0-based index.
    Junction(usize, Direction),
    /// The equivalent junction spanning the whole network.
    Overall(Direction),
}

impl fmt::Display for ScatterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = |d: &Direction| match d {
            Direction::Forward => 'f',
            Direction::Backward => 'b',
        };
        match self {
            ScatterLabel::Junction(i, dir) => write!(f, "S_{}{}", i + 1, d(dir)),
            ScatterLabel::Overall(dir) => write!(f, "S_{}", d(dir)),
        }
    }
}

/// `[S_1f, S_1b, ..., S_Jf, S_Jb, S_f, S_b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterVector {
    entries: Vec<(ScatterLabel, f64)>,
}

impl ScatterVector {
    /// Values laid out as `[S_1f, S_1b, ..., S_f, S_b]`; length must be even and at least 4.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.len() < 4 || values.len() % 2 != 0 {
            return Err(Error::InvalidConfig("scatter vector needs 2J + 2 entries"));
        }
        let junctions = values.len() / 2 - 1;
        let entries = labels(junctions).zip(values.iter().copied()).collect();
        Ok(ScatterVector { entries })
    }

    pub fn entries(&self) -> &[(ScatterLabel, f64)] {
        &self.entries
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|&(_, v)| v).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, label: ScatterLabel) -> Option<f64> {
        self.entries.iter().find(|(l, _)| *l == label).map(|&(_, v)| v)
    }

    /// Ascending copy of the values.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values();
        v.sort_by(f64::total_cmp);
        v
    }

    /// How many entries equal the minimum.
    pub fn min_occurrences(&self) -> usize {
        let m = scatter_metric(self);
        self.entries.iter().filter(|&&(_, v)| v == m).count()
    }
}

fn labels(junctions: usize) -> impl Iterator<Item = ScatterLabel> {
    (0..junctions)
        .flat_map(|i| [ScatterLabel::Junction(i, Direction::Forward), ScatterLabel::Junction(i, Direction::Backward)])
        .chain([ScatterLabel::Overall(Direction::Forward), ScatterLabel::Overall(Direction::Backward)])
}

/// Forward and backward scatter of one (possibly composed) matrix.
fn scatter_pair(a: &AdjacencyMatrix, left_windows: u64, right_windows: u64) -> Result<(f64, f64)> {
    let lp = make_partition(a.cols(), left_windows)?;
    let rp = make_partition(a.rows(), right_windows)?;
    let f = scatter_forward(&left_window_adjacency(a, &lp)?, lp.window_count(), a.rows())?;
    let b = scatter_backward(&right_window_adjacency(a, &rp)?, rp.window_count(), a.cols())?;
    Ok((f, b))
}

/// Scatter of every junction followed by the whole-network equivalent junction.
pub fn scatter_vector(pattern: &ConnectionPattern) -> Result<ScatterVector> {
    let topology = pattern.topology();
    let j = topology.junction_count();
    let mut values = Vec::with_capacity(2 * j + 2);
    for (spec, a) in topology.junctions().iter().zip(pattern.adjacency()) {
        let (f, b) = scatter_pair(a, spec.fan_in() as u64, spec.fan_out() as u64)?;
        values.push(f);
        values.push(b);
    }
    let (fo, fi) = topology.equivalent_fans(0, j - 1)?;
    let composed = pattern.compose(0, j - 1)?;
    let (f, b) = scatter_pair(&composed, fi, fo)?;
    values.push(f);
    values.push(b);
    ScatterVector::from_values(&values)
}

/// The minimum entry.
pub fn scatter_metric(v: &ScatterVector) -> f64 {
    v.entries.iter().map(|&(_, x)| x).fold(f64::INFINITY, f64::min)
}

/// Compares ascending-sorted entries lexicographically.
///
/// `Ordering::Greater` means `a` is the better pattern: at the first
/// position where the sorted lists differ, `a` holds the larger value.
pub fn compare_scatter(a: &ScatterVector, b: &ScatterVector) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let (sa, sb) = (a.sorted_values(), b.sorted_values());
    Ok(sa.iter().zip(&sb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal))
}
