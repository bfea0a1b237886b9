//! Netpbm graymap codec (P2 ASCII and P5 binary, maxval <= 255).

use std::fs;
use std::path::Path;

use super::{EdgeMap, GrayImage};
use crate::error::{Error, Result};

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self
            .data
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.data[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        let tok = self
            .token()
            .ok_or_else(|| Error::Pgm(format!("unexpected end of data reading {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                Error::Pgm(format!(
                    "invalid {what}: `{}`",
                    String::from_utf8_lossy(tok)
                ))
            })
    }
}

/// Number of bits needed for intensities `0..=maxval`.
fn bits_for_maxval(maxval: u32) -> usize {
    (u32::BITS - maxval.leading_zeros()) as usize
}

/// Parses a P2 or P5 graymap. The bit depth is the smallest `q` with
/// `2^q > maxval`.
pub fn parse_pgm(data: &[u8]) -> Result<GrayImage> {
    let mut cur = Cursor { data, pos: 0 };
    let binary = match cur.token() {
        Some(b"P2") => false,
        Some(b"P5") => true,
        Some(other) => {
            return Err(Error::Pgm(format!(
                "unsupported magic `{}` (expected P2 or P5)",
                String::from_utf8_lossy(other)
            )))
        }
        None => return Err(Error::Pgm("empty file".into())),
    };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Pgm(format!("maxval {maxval} outside 1..=255")));
    }
    if width != height || width < 2 || !width.is_power_of_two() {
        return Err(Error::InvalidImage(format!(
            "{width}x{height} is not a square power-of-two image"
        )));
    }

    let count = width * height;
    let mut pixels = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        let start = cur.pos + 1;
        let raster = data
            .get(start..start + count)
            .ok_or_else(|| Error::Pgm(format!("raster truncated: expected {count} bytes")))?;
        pixels.extend(raster.iter().map(|&b| u16::from(b)));
    } else {
        for i in 0..count {
            let v = cur.number(&format!("pixel {i}"))?;
            pixels.push(v.min(u32::from(u16::MAX)) as u16);
        }
    }
    if let Some(p) = pixels.iter().find(|&&p| u32::from(p) > maxval) {
        return Err(Error::Pgm(format!(
            "pixel value {p} exceeds maxval {maxval}"
        )));
    }
    GrayImage::new(
        width.trailing_zeros() as usize,
        bits_for_maxval(maxval),
        pixels,
    )
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    parse_pgm(&fs::read(path)?)
}

fn p2_text(side: usize, maxval: u32, values: impl Iterator<Item = u32>) -> String {
    let mut out = format!("P2\n{side} {side}\n{maxval}\n");
    let values: Vec<String> = values.map(|v| v.to_string()).collect();
    for row in values.chunks(side) {
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// P2 text for an image, with maxval `2^q - 1` so the bit depth survives a
/// reload.
pub fn image_to_pgm(image: &GrayImage) -> String {
    p2_text(
        image.side(),
        (1u32 << image.bit_depth()) - 1,
        image.pixels().iter().map(|&p| u32::from(p)),
    )
}

/// P2 text for an edge map: 255 on edges, 0 elsewhere.
pub fn edge_map_to_pgm(map: &EdgeMap) -> String {
    p2_text(
        map.side(),
        255,
        map.bits().iter().map(|&b| if b { 255 } else { 0 }),
    )
}

pub fn write_pgm(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, image_to_pgm(image))?;
    Ok(())
}

pub fn write_edge_map(map: &EdgeMap, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, edge_map_to_pgm(map))?;
    Ok(())
}
