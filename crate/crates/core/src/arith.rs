//! Reversible arithmetic builders: MAJ/UMA blocks, the ripple-carry adder,
//! two's-complement negation, subtraction, absolute-value subtraction and
//! modular increment/decrement ladders.
//!
//! Every builder emits X-family gates only, so each output is a permutation
//! of computational basis states.

use crate::error::{Error, Result};
use crate::sim::{Circuit, Control, Gate, Qubit};

/// A named, ordered list of qubits, least-significant bit first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterRef {
    pub name: String,
    pub qubits: Vec<Qubit>,
}

impl RegisterRef {
    pub fn new(name: impl Into<String>, qubits: Vec<Qubit>) -> Self {
        RegisterRef {
            name: name.into(),
            qubits,
        }
    }

    /// `width` consecutive qubits starting at `start`.
    pub fn contiguous(name: impl Into<String>, start: usize, width: usize) -> Self {
        RegisterRef::new(name, (start..start + width).map(Qubit).collect())
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    pub fn msb(&self) -> Option<Qubit> {
        self.qubits.last().copied()
    }

    pub fn contains(&self, q: Qubit) -> bool {
        self.qubits.contains(&q)
    }

    /// Register value encoded in basis index `index`.
    pub fn read(&self, index: usize) -> u64 {
        self.qubits.iter().enumerate().fold(0u64, |acc, (bit, q)| {
            acc | (((index >> q.0) & 1) as u64) << bit
        })
    }

    /// Basis index `index` with this register overwritten by `value`.
    pub fn write(&self, index: usize, value: u64) -> usize {
        self.qubits.iter().enumerate().fold(index, |acc, (bit, q)| {
            if (value >> bit) & 1 == 1 {
                acc | q.mask()
            } else {
                acc & !q.mask()
            }
        })
    }

    /// Bitmask of all qubits in the register.
    pub fn mask(&self) -> usize {
        self.qubits.iter().fold(0, |m, q| m | q.mask())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The first `width` qubits as a new register.
    pub fn low(&self, width: usize) -> RegisterRef {
        RegisterRef::new(format!("{}_lo", self.name), self.qubits[..width].to_vec())
    }

    /// This register with `q` appended as a new most-significant bit.
    pub fn extended(&self, q: Qubit) -> RegisterRef {
        let mut qubits = self.qubits.clone();
        qubits.push(q);
        RegisterRef::new(self.name.clone(), qubits)
    }

    /// X gates loading `value` into a register assumed to be `|0>`.
    pub fn load_constant(&self, value: u64, host_width: usize) -> Result<Circuit> {
        if self.width() < 64 && value >> self.width() != 0 {
            return Err(Error::ValueRange {
                value,
                width: self.width(),
            });
        }
        let mut c = Circuit::new(host_width, format!("load {}={value}", self.name));
        for (bit, q) in self.qubits.iter().enumerate() {
            if (value >> bit) & 1 == 1 {
                c.push(Gate::x(*q))?;
            }
        }
        Ok(c)
    }
}

/// Wiring of the ripple-carry adder. `carry_out` may be omitted, in which
/// case the adder computes `a + b mod 2^n` with no overflow wire.
#[derive(Clone, Debug)]
pub struct AdderLayout {
    pub a: RegisterRef,
    pub b: RegisterRef,
    pub carry_in: Qubit,
    pub carry_out: Option<Qubit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftDirection {
    Up,
    Down,
}

fn span(qubits: impl IntoIterator<Item = Qubit>) -> usize {
    qubits.into_iter().map(|q| q.0 + 1).max().unwrap_or(0)
}

fn ensure_distinct(qubits: impl IntoIterator<Item = Qubit>) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for q in qubits {
        if !seen.insert(q) {
            return Err(Error::DuplicateQubit(q.0));
        }
    }
    Ok(())
}

fn ensure_nonempty(reg: &RegisterRef) -> Result<()> {
    if reg.width() == 0 {
        return Err(Error::EmptyRegister(reg.name.clone()));
    }
    Ok(())
}

/// Majority block on `(c, b, a)`: `|c,b,a> -> |c^a, b^a, MAJ(a,b,c)>`.
pub fn build_maj(c: Qubit, b: Qubit, a: Qubit) -> Result<Circuit> {
    ensure_distinct([c, b, a])?;
    let mut out = Circuit::new(span([c, b, a]), "MAJ");
    out.push(Gate::cx(a, b))?;
    out.push(Gate::cx(a, c))?;
    out.push(Gate::ccx(c, b, a))?;
    Ok(out)
}

/// Unmajority-and-add on `(c, b, a)`. After a matching MAJ this restores `c`
/// and `a` and leaves the sum bit `a^b^c` on the middle wire.
pub fn build_uma(c: Qubit, b: Qubit, a: Qubit) -> Result<Circuit> {
    ensure_distinct([c, b, a])?;
    let mut out = Circuit::new(span([c, b, a]), "UMA");
    out.push(Gate::ccx(c, b, a))?;
    out.push(Gate::cx(a, c))?;
    out.push(Gate::cx(c, b))?;
    Ok(out)
}

/// In-place ripple-carry adder: `|a>|b>|0>|z> -> |a>|a+b mod 2^n>|0>|z^carry>`.
pub fn build_qrca(layout: &AdderLayout) -> Result<Circuit> {
    let AdderLayout {
        a,
        b,
        carry_in,
        carry_out,
    } = layout;
    if a.width() != b.width() {
        return Err(Error::WidthMismatch {
            what: "adder operands",
            left: a.width(),
            right: b.width(),
        });
    }
    ensure_nonempty(a)?;
    let all = a
        .qubits
        .iter()
        .chain(&b.qubits)
        .copied()
        .chain(std::iter::once(*carry_in))
        .chain(*carry_out);
    ensure_distinct(all.clone())?;

    let n = a.width();
    let mut out = Circuit::new(span(all), "QRCA");
    let carry = |i: usize| if i == 0 { *carry_in } else { a.qubits[i - 1] };
    for i in 0..n {
        out.append(&build_maj(carry(i), b.qubits[i], a.qubits[i])?)?;
    }
    if let Some(z) = carry_out {
        out.push(Gate::cx(a.qubits[n - 1], *z))?;
    }
    for i in (0..n).rev() {
        out.append(&build_uma(carry(i), b.qubits[i], a.qubits[i])?)?;
    }
    Ok(out)
}

/// `|x> -> |x + 1 mod 2^w>`, every gate additionally conditioned on
/// `controls`. Multi-controlled X ladder from the most significant bit down.
pub fn build_increment(reg: &RegisterRef, controls: &[Control]) -> Result<Circuit> {
    ensure_nonempty(reg)?;
    for c in controls {
        if reg.contains(c.qubit) {
            return Err(Error::Overlap {
                qubit: c.qubit.0,
                register: reg.name.clone(),
            });
        }
    }
    ensure_distinct(
        reg.qubits
            .iter()
            .copied()
            .chain(controls.iter().map(|c| c.qubit)),
    )?;
    let width = span(
        reg.qubits
            .iter()
            .copied()
            .chain(controls.iter().map(|c| c.qubit)),
    );
    let mut out = Circuit::new(width, "inc");
    for i in (0..reg.width()).rev() {
        let mut ctrls: Vec<Control> = controls.to_vec();
        ctrls.extend(reg.qubits[..i].iter().map(|q| Control::on(*q)));
        out.push(Gate::mcx(ctrls, reg.qubits[i]))?;
    }
    Ok(out)
}

/// Modular ladder shift `|x> -> |x +/- 1 mod 2^n>`, optionally controlled.
pub fn build_ladder_shift(
    pos: &RegisterRef,
    direction: ShiftDirection,
    control: Option<Qubit>,
) -> Result<Circuit> {
    let controls: Vec<Control> = control.into_iter().map(Control::on).collect();
    let up = build_increment(pos, &controls)?;
    let name = match (direction, control) {
        (ShiftDirection::Up, None) => "ladder-up",
        (ShiftDirection::Down, None) => "ladder-down",
        (ShiftDirection::Up, Some(_)) => "c-ladder-up",
        (ShiftDirection::Down, Some(_)) => "c-ladder-down",
    };
    Ok(match direction {
        ShiftDirection::Up => up,
        ShiftDirection::Down => up.inverse(),
    }
    .with_name(name))
}

/// Two's-complement negation `|y> -> |-y mod 2^w>`: X on every bit, then +1.
pub fn build_s2c(target: &RegisterRef) -> Result<Circuit> {
    ensure_nonempty(target)?;
    let mut out = Circuit::new(span(target.qubits.iter().copied()), "S2C");
    for q in &target.qubits {
        out.push(Gate::x(*q))?;
    }
    out.append(&build_increment(target, &[])?)?;
    Ok(out)
}

/// `|x>|y> -> |x>|x - y mod 2^w>`: negate `b`, then add `a` into it.
pub fn build_subtractor(layout: &AdderLayout) -> Result<Circuit> {
    let adder = build_qrca(layout)?;
    let mut out = Circuit::new(adder.num_qubits(), "SUB");
    out.append(&build_s2c(&layout.b)?)?;
    out.append(&adder)?;
    Ok(out)
}

/// Absolute-value subtraction `|a>|b> -> |a>|sign, |a - b|>`.
///
/// `b`'s most significant qubit is the sign of `a - b`; the remaining bits
/// hold the magnitude. Both operands must be below `2^(w-1)`, i.e. callers
/// zero-extend q-bit values to `q + 1` wires. No carry-out is produced.
pub fn build_abs_subtractor(a: &RegisterRef, b: &RegisterRef, carry_in: Qubit) -> Result<Circuit> {
    if a.width() != b.width() {
        return Err(Error::WidthMismatch {
            what: "abs-subtractor operands",
            left: a.width(),
            right: b.width(),
        });
    }
    if b.width() < 2 {
        return Err(Error::WidthMismatch {
            what: "abs-subtractor needs a sign bit plus at least one magnitude bit",
            left: b.width(),
            right: 2,
        });
    }
    let layout = AdderLayout {
        a: a.clone(),
        b: b.clone(),
        carry_in,
        carry_out: None,
    };
    let sub = build_subtractor(&layout)?;
    let sign = b.msb().expect("width checked");
    let magnitude = b.low(b.width() - 1);
    let fix = build_s2c(&magnitude)?.controlled_by(&[Control::on(sign)])?;

    let mut out = Circuit::new(sub.num_qubits().max(fix.num_qubits()), "ABS-SUB");
    out.append(&sub)?;
    out.append(&fix)?;
    Ok(out)
}
