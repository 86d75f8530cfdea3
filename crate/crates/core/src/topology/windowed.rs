//! Planned low-scatter patterns.
//!
//! Junction `i` splits its left layer into `fan_in` contiguous windows of
//! `N_i / fan_in` neurons and its right layer into `fan_out` contiguous
//! windows of `N_{i+1} / fan_out` neurons. A [`Locality`] `(forward,
//! backward)` then restricts:
//!
//! - each right neuron `j` to draw from the `forward` contiguous left
//!   windows of group `j mod (fan_in / forward)`, taking `fan_in / forward`
//!   edges from each;
//! - each left neuron `k` to feed the `backward` contiguous right windows of
//!   group `k mod (fan_out / backward)`, sending `fan_out / backward` edges
//!   into each.
//!
//! Edges between left window `u` and right window `v` form a cell whose
//! members are the left neurons of `u` assigned to `v`'s group and the right
//! neurons of `v` assigned to `u`'s group. Each cell is filled with a
//! circulant biregular graph rotated by `u` plus a per-junction offset drawn
//! from the seed. The forward and backward scatter of junction `i` are then
//! exactly `forward / fan_in` and `backward / fan_out`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{AdjacencyMatrix, ConnectionPattern, GeneratorTag, JunctionSpec, NetworkTopology};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Per-junction window concentration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Locality {
    /// Every right neuron reads every left window and every left neuron
    /// feeds every right window, one edge per window where possible.
    Full,
    /// `forward` in `1..=fan_in` left windows per right neuron and
    /// `backward` in `1..=fan_out` right windows per left neuron.
    Concentrated { forward: usize, backward: usize },
}

impl Locality {
    /// `(forward, backward)` window counts for `spec`.
    pub fn resolve(&self, spec: &JunctionSpec) -> (usize, usize) {
        match *self {
            Locality::Full => (spec.fan_in(), spec.fan_out()),
            Locality::Concentrated { forward, backward } => (forward, backward),
        }
    }
}

impl fmt::Display for Locality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locality::Full => f.write_str("full"),
            Locality::Concentrated { forward, backward } => write!(f, "{forward}:{backward}"),
        }
    }
}

/// Parses `full` or `forward:backward`. Either side of the colon may be
/// `*` for "all windows on this side".
impl FromStr for Locality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "full" {
            return Ok(Locality::Full);
        }
        let (f, b) = s.split_once(':').ok_or(Error::InvalidConfig("locality must be `full` or `forward:backward`"))?;
        let parse = |x: &str| -> Result<usize> {
            if x.trim() == "*" {
                Ok(0)
            } else {
                x.trim().parse().map_err(|_| Error::InvalidConfig("locality counts must be integers"))
            }
        };
        Ok(Locality::Concentrated { forward: parse(f)?, backward: parse(b)? })
    }
}

struct CellPlan {
    left_window: usize,
    right_window: usize,
    forward_groups: usize,
    backward_groups: usize,
    per_window_in: usize,
    per_window_out: usize,
}

fn plan(index: usize, spec: &JunctionSpec, locality: Locality) -> Result<CellPlan> {
    let infeasible = |reason| Error::InfeasibleLocality { junction: index, reason };
    let (fi, fo) = (spec.fan_in(), spec.fan_out());
    let (mut forward, mut backward) = locality.resolve(spec);
    // `*` parses to 0 and means "all windows".
    if forward == 0 {
        forward = fi;
    }
    if backward == 0 {
        backward = fo;
    }
    if forward > fi || fi % forward != 0 {
        return Err(infeasible("forward concentration must divide the fan-in"));
    }
    if backward > fo || fo % backward != 0 {
        return Err(infeasible("backward concentration must divide the fan-out"));
    }
    let left_window = spec.n_left() / fi;
    let right_window = spec.n_right() / fo;
    if left_window * fi != spec.n_left() || right_window * fo != spec.n_right() {
        return Err(infeasible("fans do not partition the layers into equal windows"));
    }
    let forward_groups = fi / forward;
    let backward_groups = fo / backward;
    if right_window % forward_groups != 0 {
        return Err(infeasible("right windows cannot be shared evenly between forward groups"));
    }
    if left_window % backward_groups != 0 {
        return Err(infeasible("left windows cannot be shared evenly between backward groups"));
    }
    let per_window_in = fi / forward;
    let per_window_out = fo / backward;
    if per_window_out > right_window / forward_groups {
        return Err(infeasible("too few right neurons per cell for the fan-out"));
    }
    if per_window_in > left_window / backward_groups {
        return Err(infeasible("too few left neurons per cell for the fan-in"));
    }
    Ok(CellPlan { left_window, right_window, forward_groups, backward_groups, per_window_in, per_window_out })
}

fn windowed_junction(index: usize, spec: &JunctionSpec, locality: Locality, offset: usize) -> Result<AdjacencyMatrix> {
    let p = plan(index, spec, locality)?;
    let (fi, fo) = (spec.fan_in(), spec.fan_out());
    let forward = fi / p.forward_groups;
    let backward = fo / p.backward_groups;
    let mut rows: Vec<Vec<u32>> = vec![Vec::with_capacity(fi); spec.n_right()];
    let mut left_members = Vec::new();
    let mut right_members = Vec::new();
    for u in 0..fi {
        let u_group = u / forward;
        for v in 0..fo {
            let v_group = v / backward;
            left_members.clear();
            left_members.extend(
                (u * p.left_window..(u + 1) * p.left_window).filter(|k| k % p.backward_groups == v_group),
            );
            right_members.clear();
            right_members.extend(
                (v * p.right_window..(v + 1) * p.right_window).filter(|j| j % p.forward_groups == u_group),
            );
            let b = right_members.len();
            let rotate = (u + offset) % b;
            for e in 0..left_members.len() * p.per_window_out {
                let k = left_members[e / p.per_window_out];
                let j = right_members[(e + rotate) % b];
                rows[j].push(k as u32);
            }
        }
    }
    debug_assert!(rows.iter().all(|r| r.len() == fi));
    debug_assert!(p.per_window_in * forward == fi);
    AdjacencyMatrix::from_rows(spec.n_left(), rows)
}

/// Planned pattern with one [`Locality`] per junction.
///
/// Deterministic in `(topology, locality, seed)`; the seed only rotates the
/// circulant cells.
pub fn generate_windowed_pattern(
    topology: &NetworkTopology,
    locality: &[Locality],
    seed: u64,
) -> Result<ConnectionPattern> {
    if locality.len() != topology.junction_count() {
        return Err(Error::LengthMismatch { left: topology.junction_count(), right: locality.len() });
    }
    let adjacency = topology
        .junctions()
        .iter()
        .zip(locality)
        .enumerate()
        .map(|(i, (spec, &loc))| {
            let offset = (derive_seed(seed, i as u64) % spec.n_right().max(1) as u64) as usize;
            windowed_junction(i, spec, loc, offset)
        })
        .collect::<Result<Vec<_>>>()?;
    ConnectionPattern::new(topology.clone(), adjacency, Some(seed), GeneratorTag::Windowed)
}
