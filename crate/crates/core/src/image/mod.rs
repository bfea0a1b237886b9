//! Classical image types, PGM I/O, the qubit layout and the NEQR oracle.

mod layout;
mod neqr;
mod pgm;

pub use layout::{Axis, RegisterLayout};
pub use neqr::{
    build_controlled_neqr, build_neqr_inverse, build_neqr_oracle, build_position_superposition,
};
pub use pgm::{edge_map_to_pgm, image_to_pgm, load_pgm, parse_pgm, write_edge_map, write_pgm};

use crate::error::{Error, Result};

/// Square `2^n x 2^n` grid of `q`-bit intensities, stored row-major.
///
/// The first coordinate (`x`) selects the row, the second (`y`) the column,
/// matching the `|x>|y>` order of the position registers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    side_log2: usize,
    bit_depth: usize,
    pixels: Vec<u16>,
}

impl GrayImage {
    pub fn new(side_log2: usize, bit_depth: usize, pixels: Vec<u16>) -> Result<Self> {
        if side_log2 == 0 || side_log2 > 12 {
            return Err(Error::InvalidImage(format!(
                "side 2^{side_log2} is outside the supported range 2..=4096"
            )));
        }
        if bit_depth == 0 || bit_depth > 16 {
            return Err(Error::InvalidImage(format!(
                "bit depth {bit_depth} is outside 1..=16"
            )));
        }
        let side = 1usize << side_log2;
        if pixels.len() != side * side {
            return Err(Error::InvalidImage(format!(
                "expected {} pixels for a {side}x{side} image, got {}",
                side * side,
                pixels.len()
            )));
        }
        let limit = 1u32 << bit_depth;
        if let Some(p) = pixels.iter().find(|&&p| u32::from(p) >= limit) {
            return Err(Error::InvalidImage(format!(
                "pixel value {p} does not fit in {bit_depth} bits"
            )));
        }
        Ok(GrayImage {
            side_log2,
            bit_depth,
            pixels,
        })
    }

    /// Builds an image from rows; the grid must be square with a
    /// power-of-two side.
    pub fn from_rows(rows: &[Vec<u16>], bit_depth: usize) -> Result<Self> {
        let side = rows.len();
        if side < 2 || !side.is_power_of_two() {
            return Err(Error::InvalidImage(format!(
                "side {side} is not a power of two >= 2"
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != side) {
            return Err(Error::InvalidImage(format!(
                "image is not square: row of length {} in a {side}-row grid",
                r.len()
            )));
        }
        let pixels = rows.iter().flatten().copied().collect();
        GrayImage::new(side.trailing_zeros() as usize, bit_depth, pixels)
    }

    pub fn side_log2(&self) -> usize {
        self.side_log2
    }

    pub fn side(&self) -> usize {
        1 << self.side_log2
    }

    pub fn bit_depth(&self) -> usize {
        self.bit_depth
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    /// Intensity at row `x`, column `y`.
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.pixels[x * self.side() + y]
    }

    pub fn rows(&self) -> Vec<Vec<u16>> {
        self.pixels
            .chunks(self.side())
            .map(|r| r.to_vec())
            .collect()
    }

    /// Requantizes to `bit_depth` bits by dropping low-order bits.
    pub fn with_bit_depth(&self, bit_depth: usize) -> Result<Self> {
        if bit_depth > self.bit_depth {
            return Err(Error::InvalidImage(format!(
                "cannot raise bit depth from {} to {bit_depth}",
                self.bit_depth
            )));
        }
        let shift = self.bit_depth - bit_depth;
        let pixels = self.pixels.iter().map(|p| p >> shift).collect();
        GrayImage::new(self.side_log2, bit_depth, pixels)
    }
}

/// Binary `2^n x 2^n` edge map, row-major with the same orientation as
/// [`GrayImage`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeMap {
    side_log2: usize,
    bits: Vec<bool>,
}

impl EdgeMap {
    pub fn empty(side_log2: usize) -> Self {
        let side = 1usize << side_log2;
        EdgeMap {
            side_log2,
            bits: vec![false; side * side],
        }
    }

    pub fn from_bits(side_log2: usize, bits: Vec<bool>) -> Result<Self> {
        let side = 1usize << side_log2;
        if bits.len() != side * side {
            return Err(Error::InvalidImage(format!(
                "edge map needs {} cells, got {}",
                side * side,
                bits.len()
            )));
        }
        Ok(EdgeMap { side_log2, bits })
    }

    pub fn side_log2(&self) -> usize {
        self.side_log2
    }

    pub fn side(&self) -> usize {
        1 << self.side_log2
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.side() + y]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        let side = self.side();
        self.bits[x * side + y] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Cell-wise OR. Panics if the sides differ.
    pub fn union(&self, other: &EdgeMap) -> EdgeMap {
        assert_eq!(self.side_log2, other.side_log2, "edge map sides differ");
        EdgeMap {
            side_log2: self.side_log2,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| *a || *b)
                .collect(),
        }
    }

    /// `(x, y)` of every set cell in row-major order.
    pub fn positions(&self) -> Vec<(usize, usize)> {
        let side = self.side();
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| (i / side, i % side))
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        self.bits.chunks(self.side()).map(|r| r.to_vec()).collect()
    }
}
