//! IDX decoding (the MNIST container format).
//!
//! Big-endian magic `0x00000803` for rank-3 unsigned-byte images and
//! `0x00000801` for rank-1 unsigned-byte labels, followed by the dimension
//! sizes as big-endian `u32` and the raw payload.

use alloc::vec::Vec;

use super::Dataset;
use crate::error::{Error, Result};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(Error::TruncatedFile { expected: at + 4, found: bytes.len() })
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    let magic = read_u32(bytes, 0)?;
    if magic != IMAGES_MAGIC {
        return Err(Error::BadMagic { expected: IMAGES_MAGIC, found: magic });
    }
    let count = read_u32(bytes, 4)? as usize;
    let rows = read_u32(bytes, 8)? as usize;
    let cols = read_u32(bytes, 12)? as usize;
    let expected = 16 + count * rows * cols;
    if bytes.len() < expected {
        return Err(Error::TruncatedFile { expected, found: bytes.len() });
    }
    Ok(IdxImages { count, rows, cols, pixels: bytes[16..expected].to_vec() })
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = read_u32(bytes, 0)?;
    if magic != LABELS_MAGIC {
        return Err(Error::BadMagic { expected: LABELS_MAGIC, found: magic });
    }
    let count = read_u32(bytes, 4)? as usize;
    let expected = 8 + count;
    if bytes.len() < expected {
        return Err(Error::TruncatedFile { expected, found: bytes.len() });
    }
    Ok(bytes[8..expected].to_vec())
}

/// Flattened row-major images scaled to `[0, 1]`, ten classes.
pub fn dataset_from_idx(images: &IdxImages, labels: &[u8], name: &str) -> Result<Dataset> {
    if images.count != labels.len() {
        return Err(Error::CountMismatch { images: images.count, labels: labels.len() });
    }
    let inputs = images.pixels.iter().map(|&p| p as f64 / 255.0).collect();
    let labels = labels.iter().map(|&l| l as usize).collect();
    Dataset::new(name, images.rows * images.cols, 10, inputs, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image_bytes(count: u32, rows: u32, cols: u32, pixels: &[u8]) -> Vec<u8> {
        let mut b = Vec::new();
        for v in [IMAGES_MAGIC, count, rows, cols] {
            b.extend_from_slice(&v.to_be_bytes());
        }
        b.extend_from_slice(pixels);
        b
    }

    fn label_bytes(labels: &[u8]) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
        b.extend_from_slice(&(labels.len() as u32).to_be_bytes());
        b.extend_from_slice(labels);
        b
    }

    #[test]
    fn two_image_fixture() {
        let pixels = [0u8, 255, 51, 102, 10, 20, 30, 40];
        let images = parse_idx_images(&image_bytes(2, 2, 2, &pixels)).unwrap();
        let labels = parse_idx_labels(&label_bytes(&[7, 3])).unwrap();
        let d = dataset_from_idx(&images, &labels, "fixture").unwrap();
        assert_eq!((d.len(), d.dim(), d.class_count()), (2, 4, 10));
        assert_eq!(d.input(0), &[0.0, 1.0, 0.2, 0.4]);
        assert_eq!(d.input(1), &[10.0 / 255.0, 20.0 / 255.0, 30.0 / 255.0, 40.0 / 255.0]);
        assert_eq!(d.labels(), &[7, 3]);
    }

    #[test]
    fn header_errors() {
        let mut bad = image_bytes(1, 1, 1, &[0]);
        bad[3] = 0x01;
        assert_eq!(parse_idx_images(&bad), Err(Error::BadMagic { expected: IMAGES_MAGIC, found: 0x801 }));
        assert!(matches!(parse_idx_images(&image_bytes(2, 2, 2, &[0; 7])), Err(Error::TruncatedFile { .. })));
        assert!(matches!(parse_idx_images(&[0, 0]), Err(Error::TruncatedFile { .. })));
        assert!(matches!(parse_idx_labels(&image_bytes(1, 1, 1, &[0])), Err(Error::BadMagic { .. })));
        assert!(matches!(parse_idx_labels(&label_bytes(&[1, 2])[..9]), Err(Error::TruncatedFile { .. })));
    }

    #[test]
    fn count_mismatch() {
        let images = parse_idx_images(&image_bytes(2, 1, 1, &[0, 1])).unwrap();
        let labels = parse_idx_labels(&label_bytes(&[1])).unwrap();
        assert_eq!(dataset_from_idx(&images, &labels, "x"), Err(Error::CountMismatch { images: 2, labels: 1 }));
    }
}
