//! Reader for the IDX binary image/label format (big-endian magic and
//! dimension header, unsigned-byte payload).

use crate::data::{LabeledSet, SetTag};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use std::path::Path;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

fn read_u32_be(bytes: &[u8], offset: usize, what: &str) -> Result<u32> {
    match bytes.get(offset..offset + 4) {
        Some(chunk) => Ok(u32::from_be_bytes([chunk[0], chunk[1], chunk[2], chunk[3]])),
        None => Err(Error::IdxParse {
            offset: offset as u64,
            message: format!("file truncated while reading {what} (need 4 bytes)"),
        }),
    }
}

/// Parses an IDX image payload into an `n x (rows*cols)` matrix with pixel
/// bytes scaled to [0, 1] by division by 255.
pub fn parse_idx_images(bytes: &[u8]) -> Result<Matrix> {
    let magic = read_u32_be(bytes, 0, "images magic")?;
    if magic != IMAGES_MAGIC {
        return Err(Error::IdxParse {
            offset: 0,
            message: format!("bad images magic 0x{magic:08x}, expected 0x{IMAGES_MAGIC:08x}"),
        });
    }
    let count = read_u32_be(bytes, 4, "image count")? as usize;
    let rows = read_u32_be(bytes, 8, "image rows")? as usize;
    let cols = read_u32_be(bytes, 12, "image cols")? as usize;
    if count == 0 || rows == 0 || cols == 0 {
        return Err(Error::IdxParse {
            offset: 4,
            message: format!("degenerate image dimensions {count}x{rows}x{cols}"),
        });
    }
    let expected = count * rows * cols;
    let payload = bytes.get(16..16 + expected).ok_or(Error::IdxParse {
        offset: (16 + bytes.len().saturating_sub(16)) as u64,
        message: format!(
            "pixel payload truncated: expected {expected} bytes, found {}",
            bytes.len().saturating_sub(16)
        ),
    })?;
    Ok(Matrix::from_fn(count, rows * cols, |r, c| {
        payload[r * rows * cols + c] as f64 / 255.0
    }))
}

/// Parses an IDX label payload into raw class indices.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = read_u32_be(bytes, 0, "labels magic")?;
    if magic != LABELS_MAGIC {
        return Err(Error::IdxParse {
            offset: 0,
            message: format!("bad labels magic 0x{magic:08x}, expected 0x{LABELS_MAGIC:08x}"),
        });
    }
    let count = read_u32_be(bytes, 4, "label count")? as usize;
    let payload = bytes.get(8..8 + count).ok_or(Error::IdxParse {
        offset: (8 + bytes.len().saturating_sub(8)) as u64,
        message: format!(
            "label payload truncated: expected {count} bytes, found {}",
            bytes.len().saturating_sub(8)
        ),
    })?;
    Ok(payload.to_vec())
}

/// Loads an image/label IDX pair. Targets are one-hot over
/// `max label + 1` classes; pixels land in [0, 1].
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<LabeledSet> {
    let images = parse_idx_images(&std::fs::read(images_path)?)?;
    let labels = parse_idx_labels(&std::fs::read(labels_path)?)?;
    if labels.len() != images.rows() {
        return Err(Error::IdxParse {
            offset: 4,
            message: format!(
                "image count {} does not match label count {}",
                images.rows(),
                labels.len()
            ),
        });
    }
    let classes = *labels.iter().max().expect("non-empty by magic check") as usize + 1;
    let targets = Matrix::from_fn(labels.len(), classes, |r, c| {
        if labels[r] as usize == c {
            1.0
        } else {
            0.0
        }
    });
    Ok(LabeledSet { inputs: images, targets, tag: SetTag::Train })
}
