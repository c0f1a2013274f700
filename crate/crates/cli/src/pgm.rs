//! Binary 8-bit PGM ("P5"), the sole image format of the toolkit.
//!
//! Writer output is exactly `P5\n<width> <height>\n255\n` followed by the
//! raw row-major payload. The reader additionally tolerates standard
//! whitespace variations and `#` comments in the header; parse errors carry
//! the byte offset where decoding stopped.

use std::path::Path;

use gmrf_core::GrayImage;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("unsupported format magic {magic:?} at byte 0 (only binary \"P5\" is supported)")]
    UnsupportedFormat { magic: String },
    #[error("unsupported depth: maxval {maxval} at byte {offset} (only 255 is supported)")]
    UnsupportedDepth { maxval: u64, offset: usize },
    #[error("malformed header at byte {offset}: {what}")]
    Malformed { offset: usize, what: &'static str },
    #[error("truncated payload at byte {offset}: expected {expected} pixel bytes, got {got}")]
    Truncated {
        offset: usize,
        expected: usize,
        got: usize,
    },
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn read_number(&mut self) -> Result<u64, PgmError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(PgmError::Malformed {
                offset: start,
                what: "expected an unsigned decimal number",
            });
        }
        core::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(PgmError::Malformed {
                offset: start,
                what: "number out of range",
            })
    }
}

/// Decodes a binary 8-bit PGM image.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(PgmError::UnsupportedFormat {
            magic: String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned(),
        });
    }
    if bytes[1] != b'5' {
        return Err(PgmError::UnsupportedFormat {
            magic: String::from_utf8_lossy(&bytes[..2]).into_owned(),
        });
    }
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.read_number()? as usize;
    let height = cur.read_number()? as usize;
    let maxval_offset = {
        cur.skip_whitespace_and_comments();
        cur.pos
    };
    let maxval = cur.read_number()?;
    if maxval != 255 {
        return Err(PgmError::UnsupportedDepth {
            maxval,
            offset: maxval_offset,
        });
    }
    // exactly one whitespace byte separates the header from the payload
    if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
        return Err(PgmError::Malformed {
            offset: cur.pos,
            what: "expected a whitespace byte after maxval",
        });
    }
    cur.pos += 1;

    let expected = width.checked_mul(height).ok_or(PgmError::Malformed {
        offset: 2,
        what: "image dimensions overflow",
    })?;
    let payload = &bytes[cur.pos.min(bytes.len())..];
    if payload.len() < expected {
        return Err(PgmError::Truncated {
            offset: cur.pos + payload.len(),
            expected,
            got: payload.len(),
        });
    }
    GrayImage::from_bytes(height, width, &payload[..expected]).map_err(|_| PgmError::Malformed {
        offset: 2,
        what: "image smaller than the 3x3 minimum",
    })
}

/// Encodes the exact `P5` byte stream.
pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(&image.to_bytes());
    out
}

pub fn read_pgm(path: &Path) -> Result<GrayImage, crate::fileio::IoError> {
    let bytes = std::fs::read(path).map_err(|e| crate::fileio::IoError::read(path, e))?;
    parse_pgm(&bytes).map_err(|e| crate::fileio::IoError::parse(path, e.to_string()))
}

pub fn write_pgm(path: &Path, image: &GrayImage) -> Result<(), crate::fileio::IoError> {
    crate::fileio::write_atomic(path, &encode_pgm(image))
}
