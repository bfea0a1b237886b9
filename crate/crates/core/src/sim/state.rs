use num_complex::Complex64;
use rayon::prelude::*;

use super::circuit::Circuit;
use super::gate::{Gate, GateKind};
use crate::error::{Error, Result};

/// Largest register file the simulator will allocate (2^28 amplitudes, 4 GiB).
pub const MAX_QUBITS: usize = 28;

// Below this many amplitudes the kernels run on the calling thread.
const PAR_THRESHOLD: usize = 1 << 15;
const PAR_BLOCK: usize = 1 << 12;

/// Dense vector of `2^m` complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `m` qubits.
    pub fn new_zero(num_qubits: usize) -> Result<Self> {
        Self::new_basis(num_qubits, 0)
    }

    /// The computational basis state `|index>`.
    pub fn new_basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let len = 1usize << num_qubits;
        if index >= len {
            return Err(Error::ValueRange {
                value: index as u64,
                width: num_qubits,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; the vector is
    /// taken as-is and not renormalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidImage(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: num_qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// Mutable access for non-unitary rewrites (hybrid register resets).
    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Total probability of the basis states selected by `pred`.
    pub fn probability_where(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(*i))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Basis states with `|amplitude| > tol`, in increasing index order.
    pub fn enumerate_basis(&self, tol: f64) -> Vec<(usize, Complex64)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > tol)
            .map(|(i, a)| (i, *a))
            .collect()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::WidthMismatch {
                what: "circuit width vs state width",
                left: circuit.num_qubits(),
                right: self.num_qubits,
            });
        }
        for gate in circuit.gates() {
            gate.validate(self.num_qubits)?;
        }
        for gate in circuit.gates() {
            self.apply_unchecked(gate);
        }
        Ok(())
    }

    fn apply_unchecked(&mut self, gate: &Gate) {
        let stride = gate.target.mask();
        let (mask, value) = gate.control_pattern();
        let kind = gate.kind;
        let len = self.amps.len();
        let free = (len - 1) & !mask & !stride;
        let controls = (len.trailing_zeros() - 1 - free.count_ones()) as usize;
        if controls >= 2 || (controls == 1 && len < PAR_THRESHOLD) {
            // controlled gate: visit only the pairs that match the pattern
            masked_kernel(&mut self.amps, free, stride, value, kind);
        } else if len >= PAR_THRESHOLD {
            let block = PAR_BLOCK.max(stride << 1);
            self.amps
                .par_chunks_mut(block)
                .enumerate()
                .for_each(|(k, chunk)| pair_kernel(chunk, k * block, stride, mask, value, kind));
        } else {
            pair_kernel(&mut self.amps, 0, stride, mask, value, kind);
        }
    }
}

/// Walks the subsets of `free` in increasing order; each one, combined with
/// the control `value`, is the low index of a matching pair.
fn masked_kernel(amps: &mut [Complex64], free: usize, stride: usize, value: usize, kind: GateKind) {
    let frac = std::f64::consts::FRAC_1_SQRT_2;
    let mut sub = 0usize;
    loop {
        let i = sub | value;
        let j = i | stride;
        match kind {
            GateKind::X => amps.swap(i, j),
            GateKind::Z => amps[j] = -amps[j],
            GateKind::H => {
                let (a, b) = (amps[i], amps[j]);
                amps[i] = (a + b) * frac;
                amps[j] = (a - b) * frac;
            }
        }
        if sub == free {
            break;
        }
        sub = sub.wrapping_sub(free) & free;
    }
}

/// Applies the 2x2 action to every amplitude pair `(i, i | stride)` inside
/// `chunk` whose global index satisfies the control pattern. `chunk` must be
/// aligned to `2 * stride`.
fn pair_kernel(
    chunk: &mut [Complex64],
    base: usize,
    stride: usize,
    mask: usize,
    value: usize,
    kind: GateKind,
) {
    let frac = std::f64::consts::FRAC_1_SQRT_2;
    for pair_base in (0..chunk.len()).step_by(stride << 1) {
        let (lo, hi) = chunk[pair_base..pair_base + (stride << 1)].split_at_mut(stride);
        for j in 0..stride {
            let global = base + pair_base + j;
            if global & mask != value {
                continue;
            }
            match kind {
                GateKind::X => std::mem::swap(&mut lo[j], &mut hi[j]),
                GateKind::Z => hi[j] = -hi[j],
                GateKind::H => {
                    let (a, b) = (lo[j], hi[j]);
                    lo[j] = (a + b) * frac;
                    hi[j] = (a - b) * frac;
                }
            }
        }
    }
}
