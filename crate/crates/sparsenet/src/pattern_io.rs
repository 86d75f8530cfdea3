//! Plain-text connection pattern files.
//!
//! ```text
//! version=1
//! layer_sizes=8,4,4
//! fan_outs=1,2
//! generator_tag=random
//! seed=7
//! 1 1 1
//! 1 2 1
//! ...
//! ```
//!
//! Edge lines are `junction left right`, 1-based, sorted by junction, then
//! right neuron, then left neuron. `seed=none` marks explicit patterns.

use std::fmt::Write as _;
use std::path::Path;

use sparsenet_core::topology::{AdjacencyMatrix, ConnectionPattern, GeneratorTag, NetworkTopology};

use crate::error::{Error, Result};
use crate::textfile::{join_list, parse_list, read_text, write_text, Header};

pub const PATTERN_VERSION: u32 = 1;

pub fn pattern_to_string(pattern: &ConnectionPattern) -> String {
    let topology = pattern.topology();
    let mut out = String::new();
    writeln!(out, "version={PATTERN_VERSION}").unwrap();
    writeln!(out, "layer_sizes={}", join_list(topology.layer_sizes())).unwrap();
    writeln!(out, "fan_outs={}", join_list(&topology.fan_outs())).unwrap();
    writeln!(out, "generator_tag={}", pattern.tag()).unwrap();
    match pattern.seed() {
        Some(seed) => writeln!(out, "seed={seed}").unwrap(),
        None => writeln!(out, "seed=none").unwrap(),
    }
    for i in 0..topology.junction_count() {
        for (left, right) in pattern.edges(i) {
            writeln!(out, "{} {} {}", i + 1, left + 1, right + 1).unwrap();
        }
    }
    out
}

pub fn parse_pattern(text: &str, path: &Path) -> Result<ConnectionPattern> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty()).peekable();
    let header = Header::read(&mut lines, path)?;
    let version: u32 = header.value("version")?;
    if version != PATTERN_VERSION {
        return Err(header.error("version", format!("unsupported pattern version {version}")));
    }
    let layer_sizes = parse_list(header.raw("layer_sizes")?).map_err(|m| header.error("layer_sizes", m))?;
    let fan_outs = parse_list(header.raw("fan_outs")?).map_err(|m| header.error("fan_outs", m))?;
    let tag: GeneratorTag = header.value("generator_tag")?;
    let seed = match header.raw("seed")? {
        "none" => None,
        s => Some(s.parse().map_err(|_| header.error("seed", "seed must be an integer or none"))?),
    };
    let topology = NetworkTopology::new(&layer_sizes, &fan_outs)?;
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); topology.junction_count()];
    for (line, text) in lines {
        let fields: Vec<usize> = text
            .split_whitespace()
            .map(|f| f.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(path, line, "edge lines hold three positive integers"))?;
        let [j, left, right] = fields[..] else {
            return Err(Error::parse(path, line, "edge lines hold three positive integers"));
        };
        if j == 0 || j > edges.len() || left == 0 || right == 0 {
            return Err(Error::parse(path, line, "junction or neuron index out of range"));
        }
        edges[j - 1].push((right - 1, left - 1));
    }
    let adjacency = edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let spec = topology.junction(i);
            AdjacencyMatrix::from_edges(spec.n_right(), spec.n_left(), e)
        })
        .collect::<sparsenet_core::Result<Vec<_>>>()?;
    Ok(ConnectionPattern::new(topology, adjacency, seed, tag)?)
}

pub fn write_pattern(pattern: &ConnectionPattern, path: &Path) -> Result<()> {
    write_text(path, &pattern_to_string(pattern))
}

pub fn read_pattern(path: &Path) -> Result<ConnectionPattern> {
    parse_pattern(&read_text(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sparsenet_core::topology::generate_random_pattern;

    #[test]
    fn round_trip() {
        let topo = NetworkTopology::new(&[8, 4, 4], &[1, 2]).unwrap();
        let pattern = generate_random_pattern(&topo, 7).unwrap();
        let text = pattern_to_string(&pattern);
        assert!(text.starts_with("version=1\nlayer_sizes=8,4,4\nfan_outs=1,2\ngenerator_tag=random\nseed=7\n"));
        assert_eq!(text.lines().count(), 5 + 16);
        let back = parse_pattern(&text, Path::new("p.txt")).unwrap();
        assert_eq!(back, pattern);
        assert_eq!(pattern_to_string(&back), text);
    }

    #[test]
    fn explicit_seed_none() {
        let pattern = ConnectionPattern::dense(&[2, 2]).unwrap();
        let text = pattern_to_string(&pattern);
        assert!(text.contains("seed=none"));
        assert_eq!(parse_pattern(&text, Path::new("p")).unwrap(), pattern);
    }

    #[test]
    fn rejects_broken_files() {
        let p = Path::new("p.txt");
        let good = pattern_to_string(&ConnectionPattern::dense(&[2, 2]).unwrap());
        // Dropping an edge breaks the fan-in invariant.
        let missing: String = good.lines().take(good.lines().count() - 1).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_pattern(&missing, p), Err(Error::Core(_))));
        let bad_edge = good.replace("1 2 2", "1 2 x");
        assert!(matches!(parse_pattern(&bad_edge, p), Err(Error::Parse { line: 9, .. })));
        let bad_version = good.replace("version=1", "version=9");
        assert!(matches!(parse_pattern(&bad_version, p), Err(Error::Parse { line: 1, .. })));
        let out_of_range = good.replace("1 2 2", "1 3 2");
        assert!(parse_pattern(&out_of_range, p).is_err());
        assert!(matches!(parse_pattern("version=1\n", p), Err(Error::Parse { .. })));
    }
}
