//! Binary PGM (P5, 8-bit) raster input for digit-like images.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::{Provenance, ScalarField};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a str,
}

impl<'a> Cursor<'a> {
    /// Next whitespace-delimited header token, skipping `#` comments.
    fn token(&mut self) -> Result<&'a str> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.bad("unexpected end of header"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| self.bad("non-ASCII header token"))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        tok.parse()
            .map_err(|_| self.bad(&format!("bad {what} {tok:?}")))
    }

    fn bad(&self, message: &str) -> Error {
        Error::BadFile {
            path: self.path.to_string(),
            message: message.to_string(),
        }
    }
}

/// Loads an 8-bit binary PGM into a 2D field with values in `[0, 1]`.
///
/// Image rows run top-down; the field's y axis points up, so row 0 lands at
/// the top of the unit cell. Output shape is `[width, height]`.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<ScalarField> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let bytes = fs::read(path)?;
    let mut cur = Cursor {
        bytes: &bytes,
        pos: 0,
        path: &name,
    };

    let magic = cur.token()?;
    if magic != "P5" {
        return Err(cur.bad(&format!("expected binary PGM magic P5, found {magic:?}")));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(cur.bad(&format!("maxval {maxval} outside 1..=255")));
    }
    if width == 0 || height == 0 {
        return Err(cur.bad("empty image"));
    }
    // single whitespace byte separates header from payload
    let start = cur.pos + 1;
    let need = width * height;
    if bytes.len() < start + need {
        return Err(cur.bad(&format!(
            "payload holds {} bytes, header implies {need}",
            bytes.len().saturating_sub(start)
        )));
    }
    let mut values = vec![0.0f64; need];
    for row in 0..height {
        for col in 0..width {
            let v = bytes[start + row * width + col] as f64 / maxval as f64;
            // x = col, y grows upward
            let y = height - 1 - row;
            values[col * height + y] = v;
        }
    }
    ScalarField::new(vec![width, height], values, Provenance::Binary)
}
