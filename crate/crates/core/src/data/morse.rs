//! Synthetic Morse codeword frames.
//!
//! A frame is 64 samples. Dots are one high sample, dashes three, and symbols
//! are separated by one low sample. The codeword starts at a random offset in
//! `[0, max_shift]`, then Gaussian noise is added and the result clipped to
//! `[0, 1]`.

use alloc::string::String;
use alloc::vec::Vec;

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};

pub const FRAME_LEN: usize = 64;
pub const MORSE_CLASSES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseGenSpec {
    pub samples_per_class: usize,
    pub noise_sigma: f64,
    pub max_shift: usize,
    pub seed: u64,
}

impl Default for MorseGenSpec {
    /// 125 samples per class, noise 0.2, shifts up to 2 samples. Wider shifts
    /// leave a 30-epoch MLP far from converged.
    fn default() -> Self {
        MorseGenSpec { samples_per_class: 125, noise_sigma: 0.2, max_shift: 2, seed: 0 }
    }
}

/// The codeword of class `class`: lengths 1 to 5 in order, each length in
/// binary counting order with dot as 0, then the six-dot and six-dash words.
pub fn codeword(class: usize) -> Option<String> {
    if class >= MORSE_CLASSES {
        return None;
    }
    if class == 62 {
        return Some(String::from("......"));
    }
    if class == 63 {
        return Some(String::from("------"));
    }
    let mut len = 1;
    let mut first = 0;
    while class >= first + (1 << len) {
        first += 1 << len;
        len += 1;
    }
    let bits = class - first;
    Some((0..len).map(|k| if (bits >> (len - 1 - k)) & 1 == 1 { '-' } else { '.' }).collect())
}

pub fn codewords() -> Vec<String> {
    (0..MORSE_CLASSES).filter_map(codeword).collect()
}

fn encoded_len(word: &str) -> usize {
    word.chars().map(|c| if c == '-' { 3 } else { 1 }).sum::<usize>() + word.len() - 1
}

fn longest_codeword() -> usize {
    // "-----" and "------" are the candidates; the latter is 6*3 + 5 samples.
    encoded_len("------")
}

/// The noiseless frame of `class` placed at `shift`.
pub fn prototype_frame(class: usize, shift: usize) -> Result<[f64; FRAME_LEN]> {
    let word = codeword(class).ok_or(Error::BadLabel { label: class, classes: MORSE_CLASSES })?;
    let len = encoded_len(&word);
    if shift + len > FRAME_LEN {
        return Err(Error::FrameOverflow { codeword_len: len, max_shift: shift, frame: FRAME_LEN });
    }
    let mut frame = [0.0; FRAME_LEN];
    let mut at = shift;
    for c in word.chars() {
        let width = if c == '-' { 3 } else { 1 };
        frame[at..at + width].fill(1.0);
        at += width + 1;
    }
    Ok(frame)
}

/// `samples_per_class` noisy frames per class, interleaved by class.
///
/// Sample `k` draws from its own stream derived from the seed, so the result
/// depends only on `spec`.
pub fn synthesize_morse(spec: &MorseGenSpec) -> Result<Dataset> {
    if spec.samples_per_class == 0 {
        return Err(Error::ZeroSize("samples per class"));
    }
    if !(spec.noise_sigma >= 0.0 && spec.noise_sigma.is_finite()) {
        return Err(Error::InvalidConfig("noise sigma must be finite and non-negative"));
    }
    let longest = longest_codeword();
    if spec.max_shift + longest > FRAME_LEN {
        return Err(Error::FrameOverflow { codeword_len: longest, max_shift: spec.max_shift, frame: FRAME_LEN });
    }
    let n = spec.samples_per_class * MORSE_CLASSES;
    let mut inputs = Vec::with_capacity(n * FRAME_LEN);
    let mut labels = Vec::with_capacity(n);
    for k in 0..n {
        let class = k % MORSE_CLASSES;
        let mut rng = SplitMix64::new(derive_seed(spec.seed, k as u64));
        let shift = rng.below(spec.max_shift + 1);
        let frame = prototype_frame(class, shift)?;
        for &v in &frame {
            let noisy = if spec.noise_sigma > 0.0 { v + spec.noise_sigma * rng.normal() } else { v };
            inputs.push(noisy.clamp(0.0, 1.0));
        }
        labels.push(class);
    }
    Dataset::new("morse", FRAME_LEN, MORSE_CLASSES, inputs, labels)
}
