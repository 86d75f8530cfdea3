//! Model checkpoints.
//!
//! A `key=value` header (topology, generator, seeds, config digest) followed by
//! one line per parameter:
//!
//! ```text
//! w <junction> <left> <right> <weight>
//! b <layer> <neuron> <bias>
//! ```
//!
//! Indices are 1-based, weights in canonical edge order, values written with
//! 17 significant digits so every `f64` survives the round trip.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};
use sparsenet_core::net::{SparseNet, TrainConfig};
use sparsenet_core::topology::{AdjacencyMatrix, ConnectionPattern, GeneratorTag, NetworkTopology};

use crate::error::{Error, Result};
use crate::textfile::{join_list, parse_list, read_text, write_text, Header};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Canonical text form of a training configuration.
pub fn config_text(config: &TrainConfig) -> String {
    format!(
        "optimizer={}\nlearning_rate={:e}\nadam_beta1={:e}\nadam_beta2={:e}\nadam_epsilon={:e}\nl2={:e}\nbatch_size={}\nepochs={}\nseed={}\nvalidation_fraction={:e}\n",
        config.optimizer,
        config.learning_rate,
        config.adam_beta1,
        config.adam_beta2,
        config.adam_epsilon,
        config.l2_coefficient,
        config.batch_size,
        config.epochs,
        config.seed,
        config.validation_fraction
    )
}

pub fn config_digest(config: &TrainConfig) -> String {
    Sha256::digest(config_text(config).as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Provenance recorded alongside the parameters.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CheckpointMeta {
    pub init_seed: Option<u64>,
    pub config_digest: Option<String>,
}

fn optional<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), ToString::to_string)
}

pub fn checkpoint_to_string(net: &SparseNet, meta: &CheckpointMeta) -> String {
    let pattern = net.pattern();
    let topology = pattern.topology();
    let mut out = String::new();
    writeln!(out, "version={CHECKPOINT_VERSION}").unwrap();
    writeln!(out, "layer_sizes={}", join_list(topology.layer_sizes())).unwrap();
    writeln!(out, "fan_outs={}", join_list(&topology.fan_outs())).unwrap();
    writeln!(out, "generator_tag={}", pattern.tag()).unwrap();
    writeln!(out, "pattern_seed={}", optional(&pattern.seed())).unwrap();
    writeln!(out, "init_seed={}", optional(&meta.init_seed)).unwrap();
    writeln!(out, "config_digest={}", optional(&meta.config_digest)).unwrap();
    for i in 0..topology.junction_count() {
        for ((left, right), w) in pattern.edges(i).zip(&net.weights()[i]) {
            writeln!(out, "w {} {} {} {:.16e}", i + 1, left + 1, right + 1, w).unwrap();
        }
        for (n, b) in net.biases()[i].iter().enumerate() {
            writeln!(out, "b {} {} {:.16e}", i + 2, n + 1, b).unwrap();
        }
    }
    out
}

pub fn parse_checkpoint(text: &str, path: &Path) -> Result<(SparseNet, CheckpointMeta)> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty()).peekable();
    let header = Header::read(&mut lines, path)?;
    let version: u32 = header.value("version")?;
    if version != CHECKPOINT_VERSION {
        return Err(header.error("version", format!("unsupported checkpoint version {version}")));
    }
    let layer_sizes: Vec<usize> = parse_list(header.raw("layer_sizes")?).map_err(|m| header.error("layer_sizes", m))?;
    let fan_outs: Vec<usize> = parse_list(header.raw("fan_outs")?).map_err(|m| header.error("fan_outs", m))?;
    let tag: GeneratorTag = header.value("generator_tag")?;
    let parse_opt = |key: &str| -> Result<Option<u64>> {
        match header.raw(key)? {
            "none" => Ok(None),
            s => s.parse().map(Some).map_err(|_| header.error(key, format!("bad value for {key}"))),
        }
    };
    let pattern_seed = parse_opt("pattern_seed")?;
    let init_seed = parse_opt("init_seed")?;
    let config_digest = match header.raw("config_digest")? {
        "none" => None,
        s => Some(s.to_string()),
    };
    let topology = NetworkTopology::new(&layer_sizes, &fan_outs)?;
    let junctions = topology.junction_count();
    let mut edges: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); junctions];
    let mut biases: Vec<Vec<Option<f64>>> = layer_sizes[1..].iter().map(|&n| vec![None; n]).collect();
    for (line, text) in lines {
        let bad = |m: &str| Error::parse(path, line, m);
        let fields: Vec<&str> = text.split_whitespace().collect();
        let index = |s: &str| s.parse::<usize>().ok().filter(|&v| v > 0).ok_or_else(|| bad("bad index"));
        let value = |s: &str| s.parse::<f64>().map_err(|_| bad("bad value"));
        match fields[..] {
            ["w", j, l, r, v] => {
                let j = index(j)?;
                if j > junctions {
                    return Err(bad("junction out of range"));
                }
                edges[j - 1].push((index(r)? - 1, index(l)? - 1, value(v)?));
            }
            ["b", layer, n, v] => {
                let (layer, n) = (index(layer)?, index(n)?);
                let slot = biases.get_mut(layer.wrapping_sub(2)).and_then(|b| b.get_mut(n - 1)).ok_or_else(|| bad("bias index out of range"))?;
                if slot.replace(value(v)?).is_some() {
                    return Err(bad("duplicate bias"));
                }
            }
            _ => return Err(bad("expected a weight or bias line")),
        }
    }
    let mut adjacency = Vec::with_capacity(junctions);
    let mut weights = Vec::with_capacity(junctions);
    for (i, mut e) in edges.into_iter().enumerate() {
        e.sort_by_key(|&(r, l, _)| (r, l));
        let spec = topology.junction(i);
        let pairs: Vec<(usize, usize)> = e.iter().map(|&(r, l, _)| (r, l)).collect();
        adjacency.push(AdjacencyMatrix::from_edges(spec.n_right(), spec.n_left(), &pairs)?);
        weights.push(e.into_iter().map(|(_, _, w)| w).collect());
    }
    let biases = biases
        .into_iter()
        .map(|b| b.into_iter().collect::<Option<Vec<f64>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::parse(path, text.lines().count(), "missing bias values"))?;
    let pattern = ConnectionPattern::new(topology, adjacency, pattern_seed, tag)?;
    let net = SparseNet::from_parts(pattern, weights, biases)?;
    Ok((net, CheckpointMeta { init_seed, config_digest }))
}

pub fn write_checkpoint(net: &SparseNet, meta: &CheckpointMeta, path: &Path) -> Result<()> {
    write_text(path, &checkpoint_to_string(net, meta))
}

pub fn read_checkpoint(path: &Path) -> Result<(SparseNet, CheckpointMeta)> {
    parse_checkpoint(&read_text(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sparsenet_core::rng::SplitMix64;
    use sparsenet_core::topology::generate_random_pattern;

    fn net() -> SparseNet {
        let topo = NetworkTopology::new(&[6, 8, 4], &[4, 2]).unwrap();
        let mut net = SparseNet::init(generate_random_pattern(&topo, 3).unwrap(), 4);
        let mut rng = SplitMix64::new(5);
        net.biases_mut().iter_mut().flatten().for_each(|b| *b = rng.normal() * 1e-300);
        net.weights_mut()[0][0] = f64::MIN_POSITIVE;
        net.weights_mut()[0][1] = -0.1;
        net
    }

    #[test]
    fn bit_exact_round_trip() {
        let net = net();
        let meta = CheckpointMeta { init_seed: Some(4), config_digest: Some(config_digest(&TrainConfig::default())) };
        let text = checkpoint_to_string(&net, &meta);
        let params = text.lines().filter(|l| l.starts_with("w ") || l.starts_with("b ")).count();
        assert_eq!(params, net.parameter_count());
        let (back, back_meta) = parse_checkpoint(&text, Path::new("c")).unwrap();
        assert_eq!(back_meta, meta);
        let bits = |n: &SparseNet| n.parameters().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&net));
        assert_eq!(back.pattern(), net.pattern());
        assert_eq!(checkpoint_to_string(&back, &back_meta), text);
    }

    #[test]
    fn digest_tracks_config() {
        let a = TrainConfig::default();
        assert_eq!(config_digest(&a), config_digest(&a));
        assert_eq!(config_digest(&a).len(), 64);
        assert_ne!(config_digest(&a), config_digest(&TrainConfig { seed: 1, ..a }));
    }

    #[test]
    fn rejects_incomplete_files() {
        let text = checkpoint_to_string(&net(), &CheckpointMeta::default());
        let without_last: String = text.lines().take(text.lines().count() - 1).map(|l| format!("{l}\n")).collect();
        assert!(parse_checkpoint(&without_last, Path::new("c")).is_err());
        let garbage = text.replacen("w 1", "q 1", 1);
        assert!(matches!(parse_checkpoint(&garbage, Path::new("c")), Err(Error::Parse { .. })));
    }
}
