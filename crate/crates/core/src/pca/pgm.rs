//! Plain (P2) and raw (P5) PGM image files, maxval up to 255.
//!
//! Stored gray levels map linearly onto [0,1] by dividing by maxval;
//! writing rounds v * 255 to the nearest level.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::pca::image::ImageGrid;

fn pgm_err(msg: impl Into<String>) -> Error {
    Error::Pgm(msg.into())
}

/// Header tokens, skipping whitespace and '#' comments.
struct TokenReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> TokenReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        TokenReader { bytes, pos: 0 }
    }

    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a str> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(pgm_err("unexpected end of file in header"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| pgm_err("non-ASCII header"))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.token()?
            .parse()
            .map_err(|_| pgm_err(format!("invalid {what}")))
    }
}

/// Parse a PGM image from bytes.
pub fn parse_pgm(bytes: &[u8]) -> Result<ImageGrid> {
    let mut r = TokenReader::new(bytes);
    let magic = r.token()?;
    if magic != "P2" && magic != "P5" {
        return Err(pgm_err(format!("unsupported magic {magic:?}")));
    }
    let width = r.number("width")?;
    let height = r.number("height")?;
    let maxval = r.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(pgm_err("zero image dimension"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(pgm_err(format!("unsupported maxval {maxval}")));
    }
    let count = width * height;
    let scale = maxval as f64;
    let levels: Vec<u16> = if magic == "P5" {
        // exactly one whitespace byte separates the header from raster data
        let data_start = r.pos + 1;
        if data_start + count > bytes.len() {
            return Err(pgm_err("truncated raster data"));
        }
        bytes[data_start..data_start + count]
            .iter()
            .map(|&b| b as u16)
            .collect()
    } else {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(r.number("sample")? as u16);
        }
        out
    };
    for &v in &levels {
        if v as usize > maxval {
            return Err(pgm_err(format!("sample {v} exceeds maxval {maxval}")));
        }
    }
    let pixels = levels.into_iter().map(|v| v as f64 / scale).collect();
    ImageGrid::new(width, height, pixels)
}

pub fn read_pgm(path: &Path) -> Result<ImageGrid> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    parse_pgm(&bytes)
}

/// Write a raw (P5) PGM with maxval 255.
pub fn write_pgm(path: &Path, img: &ImageGrid) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{} {}\n255\n", img.width(), img.height())?;
    let raster: Vec<u8> = img
        .pixels()
        .iter()
        .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect();
    out.write_all(&raster)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_pgm_with_comments() {
        let text = b"P2\n# a comment\n3 2\n# another\n255\n0 128 255\n64 32 16\n";
        let img = parse_pgm(text).unwrap();
        assert_eq!((img.width(), img.height()), (3, 2));
        assert!((img.get(1, 0) - 128.0 / 255.0).abs() < 1e-12);
        assert_eq!(img.get(2, 0), 1.0);
    }

    #[test]
    fn parses_smaller_maxval() {
        let text = b"P2 2 1 4\n0 4\n";
        let img = parse_pgm(text).unwrap();
        assert_eq!(img.get(0, 0), 0.0);
        assert_eq!(img.get(1, 0), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_pgm(b"P3 1 1 255 0").is_err());
        assert!(parse_pgm(b"P2 1 1 70000\n0").is_err());
        assert!(parse_pgm(b"P2 1 1 255\n300").is_err());
        assert!(parse_pgm(b"P5 2 2 255\n\x00").is_err());
    }

    #[test]
    fn binary_round_trip() {
        let img = ImageGrid::from_fn(5, 4, |x, y| ((x + y * 5) as f64 / 25.0).min(1.0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        write_pgm(&path, &img).unwrap();
        let back = read_pgm(&path).unwrap();
        assert_eq!((back.width(), back.height()), (5, 4));
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }
}
