use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Sparse non-negative integer matrix in compressed-row form.
///
/// Rows index the right (later) layer and columns the left (earlier) layer,
/// so entry `(j, k)` counts paths from left neuron `k` to right neuron `j`.
/// Column indices within a row are strictly increasing and stored values are
/// never zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdjacencyMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<u64>,
}

impl AdjacencyMatrix {
    /// Builds a {0,1} matrix from `(row, col)` pairs. Duplicates are rejected.
    pub fn from_edges(rows: usize, cols: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        for (i, &(r, c)) in sorted.iter().enumerate() {
            if r >= rows || c >= cols {
                return Err(Error::InvalidPattern("edge index out of range"));
            }
            if i > 0 && sorted[i - 1] == (r, c) {
                return Err(Error::InvalidPattern("parallel edge"));
            }
            row_ptr[r + 1] += 1;
            col_idx.push(c as u32);
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let values = vec![1u64; col_idx.len()];
        Ok(AdjacencyMatrix { rows, cols, row_ptr, col_idx, values })
    }

    /// Builds a {0,1} matrix from per-row column lists. Each list is sorted
    /// here; duplicates are rejected.
    pub fn from_rows(cols: usize, mut row_lists: Vec<Vec<u32>>) -> Result<Self> {
        let rows = row_lists.len();
        let mut row_ptr = Vec::with_capacity(rows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::with_capacity(row_lists.iter().map(Vec::len).sum());
        for list in row_lists.iter_mut() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidPattern("parallel edge"));
            }
            if list.last().is_some_and(|&c| c as usize >= cols) {
                return Err(Error::InvalidPattern("edge index out of range"));
            }
            col_idx.extend_from_slice(list);
            row_ptr.push(col_idx.len());
        }
        let values = vec![1u64; col_idx.len()];
        Ok(AdjacencyMatrix { rows, cols, row_ptr, col_idx, values })
    }

    /// Builds from a dense row-major matrix; zeros are dropped.
    pub fn from_dense(rows: usize, cols: usize, entries: &[u64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        let mut row_ptr = Vec::with_capacity(rows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for r in 0..rows {
            for (c, &v) in entries[r * cols..(r + 1) * cols].iter().enumerate() {
                if v != 0 {
                    col_idx.push(c as u32);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(AdjacencyMatrix { rows, cols, row_ptr, col_idx, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of stored (non-zero) entries.
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Column indices of the non-zero entries in row `r`, ascending.
    pub fn row_cols(&self, r: usize) -> &[u32] {
        &self.col_idx[self.row_ptr[r]..self.row_ptr[r + 1]]
    }

    pub fn row_values(&self, r: usize) -> &[u64] {
        &self.values[self.row_ptr[r]..self.row_ptr[r + 1]]
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        let cols = self.row_cols(r);
        match cols.binary_search(&(c as u32)) {
            Ok(i) => self.row_values(r)[i],
            Err(_) => 0,
        }
    }

    /// Non-zero entries as `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            self.row_cols(r).iter().zip(self.row_values(r)).map(move |(&c, &v)| (r, c as usize, v))
        })
    }

    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.rows).map(|r| self.row_values(r).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.cols];
        for (_, c, v) in self.iter() {
            sums[c] += v;
        }
        sums
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 1)
    }

    pub fn to_dense(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.rows * self.cols];
        for (r, c, v) in self.iter() {
            out[r * self.cols + c] = v;
        }
        out
    }

    /// Transposed copy.
    pub fn transpose(&self) -> AdjacencyMatrix {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.col_idx {
            counts[c as usize + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0u32; self.nnz()];
        let mut values = vec![0u64; self.nnz()];
        for (r, c, v) in self.iter() {
            let slot = next[c];
            col_idx[slot] = r as u32;
            values[slot] = v;
            next[c] += 1;
        }
        AdjacencyMatrix { rows: self.cols, cols: self.rows, row_ptr, col_idx, values }
    }

    /// Matrix product `self * rhs`. `self.cols` must equal `rhs.rows`.
    ///
    /// With `self = A_{i+1}` and `rhs = A_i` this yields the path counts
    /// across both junctions.
    pub fn matmul(&self, rhs: &AdjacencyMatrix) -> Result<AdjacencyMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut acc = vec![0u64; rhs.cols];
        let mut touched: Vec<u32> = Vec::new();
        let mut row_ptr = Vec::with_capacity(self.rows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.rows {
            for (&mid, &a) in self.row_cols(r).iter().zip(self.row_values(r)) {
                let mid = mid as usize;
                for (&c, &b) in rhs.row_cols(mid).iter().zip(rhs.row_values(mid)) {
                    if acc[c as usize] == 0 {
                        touched.push(c);
                    }
                    acc[c as usize] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                col_idx.push(c);
                values.push(acc[c as usize]);
                acc[c as usize] = 0;
            }
            touched.clear();
            row_ptr.push(col_idx.len());
        }
        Ok(AdjacencyMatrix { rows: self.rows, cols: rhs.cols, row_ptr, col_idx, values })
    }
}
