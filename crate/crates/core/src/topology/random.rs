use alloc::vec;
use alloc::vec::Vec;

use super::{AdjacencyMatrix, ConnectionPattern, GeneratorTag, NetworkTopology};
use crate::error::Result;
use crate::rng::{derive_seed, SplitMix64};

/// Random simple biregular bipartite graph.
///
/// Returns, for each right neuron, the ascending list of its `fan_in` left
/// neighbours. Every left neuron appears in exactly `fan_out` lists. The
/// caller guarantees `n_left * fan_out == n_right * fan_in`,
/// `fan_out <= n_right` and `fan_in <= n_left`.
///
/// Junctions denser than one half are generated as the complement of a
/// sparser graph, which keeps duplicate repair cheap.
pub fn random_biregular(
    n_left: usize,
    n_right: usize,
    fan_out: usize,
    fan_in: usize,
    rng: &mut SplitMix64,
) -> Vec<Vec<u32>> {
    debug_assert_eq!(n_left * fan_out, n_right * fan_in);
    if 2 * fan_out > n_right {
        let complement = if fan_out == n_right {
            vec![Vec::new(); n_right]
        } else {
            sparse_biregular(n_left, n_right, n_right - fan_out, n_left - fan_in, rng)
        };
        return complement
            .into_iter()
            .map(|missing| {
                let mut out = Vec::with_capacity(fan_in);
                let mut skip = missing.iter().peekable();
                for k in 0..n_left as u32 {
                    if skip.peek() == Some(&&k) {
                        skip.next();
                    } else {
                        out.push(k);
                    }
                }
                out
            })
            .collect();
    }
    sparse_biregular(n_left, n_right, fan_out, fan_in, rng)
}

/// Stub shuffle, deal, then randomized 2-swap repair of parallel edges.
fn sparse_biregular(
    n_left: usize,
    n_right: usize,
    fan_out: usize,
    fan_in: usize,
    rng: &mut SplitMix64,
) -> Vec<Vec<u32>> {
    let mut stubs: Vec<u32> = (0..n_left as u32).flat_map(|k| core::iter::repeat(k).take(fan_out)).collect();
    rng.shuffle(&mut stubs);
    let mut lists: Vec<Vec<u32>> = stubs
        .chunks(fan_in.max(1))
        .map(|c| {
            let mut v = c.to_vec();
            v.sort_unstable();
            v
        })
        .collect();
    lists.resize(n_right, Vec::new());

    loop {
        let mut clean = true;
        for j in 0..n_right {
            while let Some(dup) = first_duplicate(&lists[j]) {
                clean = false;
                repair(&mut lists, j, dup, rng);
            }
        }
        if clean {
            return lists;
        }
    }
}

fn first_duplicate(list: &[u32]) -> Option<u32> {
    list.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
}

fn contains(list: &[u32], k: u32) -> bool {
    list.binary_search(&k).is_ok()
}

fn remove_one(list: &mut Vec<u32>, k: u32) {
    let pos = list.binary_search(&k).expect("value present");
    list.remove(pos);
}

fn insert_sorted(list: &mut Vec<u32>, k: u32) {
    let pos = list.binary_search(&k).unwrap_or_else(|p| p);
    list.insert(pos, k);
}

/// Moves one copy of `dup` out of row `j` by exchanging it with a stub of
/// another row that neither creates a new duplicate in `j` nor in the other row.
fn repair(lists: &mut [Vec<u32>], j: usize, dup: u32, rng: &mut SplitMix64) {
    let n_right = lists.len();
    let fan_in = lists[j].len();
    let valid = |lists: &[Vec<u32>], other: usize, pos: usize| {
        let k2 = lists[other][pos];
        other != j && !contains(&lists[j], k2) && !contains(&lists[other], dup)
    };

    let mut choice = None;
    for _ in 0..64 {
        let other = rng.below(n_right);
        let pos = rng.below(fan_in);
        if valid(lists, other, pos) {
            choice = Some((other, pos));
            break;
        }
    }
    if choice.is_none() {
        // Exhaustive scan from a random starting row.
        let start = rng.below(n_right);
        'scan: for step in 0..n_right {
            let other = (start + step) % n_right;
            for pos in 0..fan_in {
                if valid(lists, other, pos) {
                    choice = Some((other, pos));
                    break 'scan;
                }
            }
        }
    }
    // No valid exchange exists: perturb with an unconstrained swap and let
    // the outer loop continue repairing.
    let (other, pos) = choice.unwrap_or_else(|| loop {
        let other = rng.below(n_right);
        if other != j || n_right == 1 {
            break (other, rng.below(fan_in));
        }
    });
    if other == j {
        return;
    }
    let k2 = lists[other][pos];
    remove_one(&mut lists[j], dup);
    insert_sorted(&mut lists[j], k2);
    lists[other].remove(pos);
    insert_sorted(&mut lists[other], dup);
}

/// One independent random biregular graph per junction.
///
/// Junction `i` draws from `SplitMix64::new(derive_seed(seed, i))`, so the
/// result is a pure function of `(topology, seed)`.
pub fn generate_random_pattern(topology: &NetworkTopology, seed: u64) -> Result<ConnectionPattern> {
    let adjacency = topology
        .junctions()
        .iter()
        .enumerate()
        .map(|(i, j)| {
            let mut rng = SplitMix64::new(derive_seed(seed, i as u64));
            let rows = random_biregular(j.n_left(), j.n_right(), j.fan_out(), j.fan_in(), &mut rng);
            AdjacencyMatrix::from_rows(j.n_left(), rows)
        })
        .collect::<Result<Vec<_>>>()?;
    ConnectionPattern::new(topology.clone(), adjacency, Some(seed), GeneratorTag::Random)
}
