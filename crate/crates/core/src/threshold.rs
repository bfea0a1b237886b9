//! Threshold classification of a gradient register.
//!
//! Two mechanisms are provided. The arithmetic comparator subtracts the
//! gradient from a register loaded with `T` and reads the sign. The phase
//! oracle route marks every `s > T` with a single prefix-recursive oracle
//! and turns that phase into an ancilla bit by kickback; it needs no
//! threshold register and exactly one ancilla.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::arith::{build_qrca, build_s2c, AdderLayout, RegisterRef};
use crate::error::{Error, Result};
use crate::sim::{Circuit, Control, Gate, Qubit};

/// A `q`-bit threshold. Bit strings are written most-significant first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Threshold {
    value: u64,
    width: usize,
}

impl Threshold {
    pub fn new(value: u64, width: usize) -> Result<Self> {
        if width == 0 || width > 32 {
            return Err(Error::InvalidThreshold(format!(
                "width {width} outside 1..=32"
            )));
        }
        if value >> width != 0 {
            return Err(Error::ValueRange { value, width });
        }
        Ok(Threshold { value, width })
    }

    /// Parses a decimal integer, a `0b`-prefixed binary literal, or a bare
    /// 0/1 string whose length equals `width` (MSB first). With `width`
    /// absent, a 0/1 string sets the width from its length.
    pub fn parse(text: &str, width: Option<usize>) -> Result<Self> {
        let text = text.trim();
        let is_bits = |s: &str| !s.is_empty() && s.bytes().all(|b| b == b'0' || b == b'1');
        let bad = || Error::InvalidThreshold(format!("cannot parse `{text}`"));
        if let Some(bits) = text.strip_prefix("0b") {
            if !is_bits(bits) {
                return Err(bad());
            }
            let w = width.unwrap_or(bits.len());
            return Threshold::new(u64::from_str_radix(bits, 2).map_err(|_| bad())?, w);
        }
        match width {
            Some(w) if text.len() == w && w > 1 && is_bits(text) => {
                Threshold::new(u64::from_str_radix(text, 2).map_err(|_| bad())?, w)
            }
            Some(w) => Threshold::new(text.parse().map_err(|_| bad())?, w),
            None if is_bits(text) => {
                Threshold::new(u64::from_str_radix(text, 2).map_err(|_| bad())?, text.len())
            }
            None => Err(Error::InvalidThreshold(format!(
                "`{text}` needs an explicit width"
            ))),
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Bit `i` of the threshold (bit 0 least significant).
    pub fn bit(&self, i: usize) -> bool {
        (self.value >> i) & 1 == 1
    }

    pub fn zero_bits(&self) -> usize {
        (0..self.width).filter(|&i| !self.bit(i)).count()
    }

    /// Largest representable threshold for this width.
    pub fn is_max(&self) -> bool {
        self.value == (1u64 << self.width) - 1
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.width)
    }
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Threshold::parse(s, None)
    }
}

/// Split of `[0, 2^q)` into values above the threshold and the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSets {
    pub above: BTreeSet<u64>,
    pub at_or_below: BTreeSet<u64>,
}

impl PartitionSets {
    pub fn of(threshold: Threshold) -> Self {
        let (above, at_or_below) = (0..1u64 << threshold.width).partition(|&s| s > threshold.value);
        PartitionSets { above, at_or_below }
    }
}

/// Independent classifier: `s > T`.
pub fn classify_bruteforce(s: u64, threshold: Threshold) -> Result<bool> {
    if s >> threshold.width != 0 {
        return Err(Error::ValueRange {
            value: s,
            width: threshold.width,
        });
    }
    Ok(s > threshold.value)
}

fn check_width(threshold: Threshold, target: &RegisterRef) -> Result<()> {
    if target.width() != threshold.width {
        return Err(Error::WidthMismatch {
            what: "threshold width vs target register",
            left: threshold.width,
            right: target.width(),
        });
    }
    Ok(())
}

fn span(qubits: impl Iterator<Item = Qubit>) -> usize {
    qubits.map(|q| q.0 + 1).max().unwrap_or(0)
}

/// Fast threshold phase oracle: `|s> -> -|s>` exactly when `s > T`.
///
/// Walking from the most significant bit, every zero bit `t_i` of the
/// threshold contributes one Z on `s_i` controlled by all higher bits, after
/// which `s_i` is flipped so that later controls test for a prefix equal to
/// `T`'s. The flips are undone at the end. `controls` are added to every Z
/// (the X gates cancel pairwise on their own).
pub fn build_ftpo(
    threshold: Threshold,
    target: &RegisterRef,
    controls: &[Control],
) -> Result<Circuit> {
    check_width(threshold, target)?;
    for c in controls {
        if target.contains(c.qubit) {
            return Err(Error::Overlap {
                qubit: c.qubit.0,
                register: target.name.clone(),
            });
        }
    }
    let width = span(
        target
            .qubits
            .iter()
            .copied()
            .chain(controls.iter().map(|c| c.qubit)),
    );
    let mut circuit = Circuit::new(width, "FTPO");
    let mut uncompute = Vec::new();
    for i in (0..threshold.width).rev() {
        if threshold.bit(i) {
            continue;
        }
        let mut ctrls: Vec<Control> = target.qubits[i + 1..]
            .iter()
            .rev()
            .map(|q| Control::on(*q))
            .collect();
        ctrls.extend_from_slice(controls);
        circuit.push(Gate::mcz(ctrls, target.qubits[i]))?;
        circuit.push(Gate::x(target.qubits[i]))?;
        uncompute.push(target.qubits[i]);
    }
    for q in uncompute {
        circuit.push(Gate::x(q))?;
    }
    Ok(circuit)
}

/// Partitioning circuit: `|0>|s> -> |[s > T]>|s>` on one ancilla, with one
/// oracle call sandwiched between Hadamards on the ancilla.
pub fn build_qpa(threshold: Threshold, grad: &RegisterRef, ancilla: Qubit) -> Result<Circuit> {
    if grad.contains(ancilla) {
        return Err(Error::Overlap {
            qubit: ancilla.0,
            register: grad.name.clone(),
        });
    }
    let oracle = build_ftpo(threshold, grad, &[Control::on(ancilla)])?;
    let mut circuit = Circuit::new(oracle.num_qubits(), "QPA");
    circuit.push(Gate::h(ancilla))?;
    circuit.append(&oracle)?;
    circuit.push(Gate::h(ancilla))?;
    Ok(circuit)
}

/// Ancilla wiring for [`build_qrca_comparator`].
#[derive(Clone, Debug)]
pub struct ComparatorLayout {
    /// Gradient magnitude, `q` bits, preserved.
    pub grad: RegisterRef,
    /// Clean `q`-bit register that receives `T` and then the low bits of
    /// `T - |grad|`.
    pub t_reg: RegisterRef,
    /// Sign of `T - |grad|`: 1 iff `|grad| > T`.
    pub sign_out: Qubit,
    /// Clean qubit zero-extending `grad` to `q + 1` bits.
    pub ext: Qubit,
    pub carry: Qubit,
}

/// Arithmetic comparator: loads `T`, then computes `T - s` in
/// `t_reg + sign_out` as `-( s + (-T) )` with two negations around the
/// ripple-carry adder. `t_reg` is left holding the difference bits.
pub fn build_qrca_comparator(threshold: Threshold, layout: &ComparatorLayout) -> Result<Circuit> {
    check_width(threshold, &layout.grad)?;
    check_width(threshold, &layout.t_reg)?;
    let diff = layout.t_reg.extended(layout.sign_out);
    let minuend = layout.grad.extended(layout.ext);
    let adder = build_qrca(&AdderLayout {
        a: minuend,
        b: diff.clone(),
        carry_in: layout.carry,
        carry_out: None,
    })?;
    let width = adder.num_qubits();
    let mut circuit = Circuit::new(width, "QRCA-CMP");
    circuit.append(&layout.t_reg.load_constant(threshold.value, width)?)?;
    circuit.append(&build_s2c(&diff)?)?;
    circuit.append(&adder)?;
    circuit.append(&build_s2c(&diff)?)?;
    Ok(circuit)
}
