use std::fmt;

use crate::arith::RegisterRef;
use crate::sim::Qubit;

/// Gradient direction. `X` moves along the row index, `Y` along the column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

/// Fixed assignment of every register of the edge-detection circuit to
/// qubit indices, little-endian and packed in this order:
///
/// | register | width | role |
/// |---|---|---|
/// | `x`, `y` | n each | pixel position |
/// | `i1`, `i2` | q each | pixel and neighbour intensity |
/// | `grad` | q | gradient magnitude |
/// | `sign_x`, `sign_y` | 1 each | sign bit of the difference, per axis |
/// | `ext` | 1 | zero extension of `i2` to q+1 bits for the subtractor |
/// | `carry` | 1 | ripple-carry input |
/// | `a1`, `a2` | 1 each | shift ancillas (x, y) |
/// | `out_x`, `out_y`, `out` | 1 each | threshold flags and their OR |
///
/// Total `2n + 3q + 9` qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    pub side_log2: usize,
    pub bit_depth: usize,
    pub x: RegisterRef,
    pub y: RegisterRef,
    pub i1: RegisterRef,
    pub i2: RegisterRef,
    pub grad: RegisterRef,
    pub sign_x: Qubit,
    pub sign_y: Qubit,
    pub ext: Qubit,
    pub carry: Qubit,
    pub a1: Qubit,
    pub a2: Qubit,
    pub out_x: Qubit,
    pub out_y: Qubit,
    pub out: Qubit,
}

/// Qubits outside the position, intensity and gradient registers.
pub const LAYOUT_CONSTANT_QUBITS: usize = 9;

impl RegisterLayout {
    pub fn new(side_log2: usize, bit_depth: usize) -> Self {
        let (n, q) = (side_log2, bit_depth);
        let x = RegisterRef::contiguous("x", 0, n);
        let y = RegisterRef::contiguous("y", n, n);
        let i1 = RegisterRef::contiguous("I1", 2 * n, q);
        let i2 = RegisterRef::contiguous("I2", 2 * n + q, q);
        let grad = RegisterRef::contiguous("grad", 2 * n + 2 * q, q);
        let base = 2 * n + 3 * q;
        let at = |k: usize| Qubit(base + k);
        RegisterLayout {
            side_log2,
            bit_depth,
            x,
            y,
            i1,
            i2,
            grad,
            sign_x: at(0),
            sign_y: at(1),
            ext: at(2),
            carry: at(3),
            a1: at(4),
            a2: at(5),
            out_x: at(6),
            out_y: at(7),
            out: at(8),
        }
    }

    /// Qubit count the layout needs for an `n`, `q` image, without building it.
    pub fn required_qubits(side_log2: usize, bit_depth: usize) -> usize {
        2 * side_log2 + 3 * bit_depth + LAYOUT_CONSTANT_QUBITS
    }

    pub fn num_qubits(&self) -> usize {
        Self::required_qubits(self.side_log2, self.bit_depth)
    }

    /// Position register that the ladder shifts act on for `axis`.
    pub fn position(&self, axis: Axis) -> &RegisterRef {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }

    pub fn sign(&self, axis: Axis) -> Qubit {
        match axis {
            Axis::X => self.sign_x,
            Axis::Y => self.sign_y,
        }
    }

    pub fn shift_ancilla(&self, axis: Axis) -> Qubit {
        match axis {
            Axis::X => self.a1,
            Axis::Y => self.a2,
        }
    }

    pub fn output(&self, axis: Axis) -> Qubit {
        match axis {
            Axis::X => self.out_x,
            Axis::Y => self.out_y,
        }
    }

    /// `q + 1`-bit signed difference register: `grad` with the axis sign bit
    /// as its most significant qubit.
    pub fn difference(&self, axis: Axis) -> RegisterRef {
        self.grad
            .extended(self.sign(axis))
            .with_name(format!("diff_{axis}"))
    }

    /// `i2` zero-extended to `q + 1` bits, the minuend of the subtractor.
    pub fn minuend(&self) -> RegisterRef {
        self.i2.extended(self.ext)
    }

    /// Row and column encoded in a basis index.
    pub fn decode_position(&self, index: usize) -> (usize, usize) {
        (self.x.read(index) as usize, self.y.read(index) as usize)
    }

    /// Every named register with its qubits, for diagnostics.
    pub fn registers(&self) -> Vec<RegisterRef> {
        let single = |name: &str, q: Qubit| RegisterRef::new(name, vec![q]);
        vec![
            self.x.clone(),
            self.y.clone(),
            self.i1.clone(),
            self.i2.clone(),
            self.grad.clone(),
            single("sign_x", self.sign_x),
            single("sign_y", self.sign_y),
            single("ext", self.ext),
            single("carry", self.carry),
            single("a1", self.a1),
            single("a2", self.a2),
            single("out_x", self.out_x),
            single("out_y", self.out_y),
            single("out", self.out),
        ]
    }
}
