use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a qubit wire in the register file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Qubit(pub usize);

impl Qubit {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }

    #[inline]
    pub fn mask(self) -> usize {
        1usize << self.0
    }
}

impl From<usize> for Qubit {
    fn from(index: usize) -> Self {
        Qubit(index)
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// A control wire. A negative control fires on `|0>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Control {
    pub qubit: Qubit,
    pub positive: bool,
}

impl Control {
    pub fn on(qubit: Qubit) -> Self {
        Control {
            qubit,
            positive: true,
        }
    }

    pub fn off(qubit: Qubit) -> Self {
        Control {
            qubit,
            positive: false,
        }
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.qubit)
        } else {
            write!(f, "!{}", self.qubit)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    X,
    H,
    /// Phase flip; with controls this is the multi-controlled Z.
    Z,
}

/// An elementary gate with an arbitrary set of (possibly negative) controls.
///
/// Every gate kind is self-inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub target: Qubit,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, target: Qubit, controls: Vec<Control>) -> Self {
        Gate {
            kind,
            target,
            controls,
        }
    }

    pub fn x(target: Qubit) -> Self {
        Gate::new(GateKind::X, target, Vec::new())
    }

    pub fn h(target: Qubit) -> Self {
        Gate::new(GateKind::H, target, Vec::new())
    }

    pub fn z(target: Qubit) -> Self {
        Gate::new(GateKind::Z, target, Vec::new())
    }

    pub fn cx(control: Qubit, target: Qubit) -> Self {
        Gate::new(GateKind::X, target, vec![Control::on(control)])
    }

    pub fn ccx(c0: Qubit, c1: Qubit, target: Qubit) -> Self {
        Gate::new(GateKind::X, target, vec![Control::on(c0), Control::on(c1)])
    }

    pub fn ch(control: Qubit, target: Qubit) -> Self {
        Gate::new(GateKind::H, target, vec![Control::on(control)])
    }

    pub fn mcx(controls: Vec<Control>, target: Qubit) -> Self {
        Gate::new(GateKind::X, target, controls)
    }

    pub fn mcz(controls: Vec<Control>, target: Qubit) -> Self {
        Gate::new(GateKind::Z, target, controls)
    }

    /// Returns a copy with `extra` appended to the control set.
    pub fn with_controls(&self, extra: &[Control]) -> Self {
        let mut g = self.clone();
        g.controls.extend_from_slice(extra);
        g
    }

    pub fn arity(&self) -> usize {
        self.controls.len()
    }

    pub fn qubits(&self) -> impl Iterator<Item = Qubit> + '_ {
        std::iter::once(self.target).chain(self.controls.iter().map(|c| c.qubit))
    }

    /// Checks wire indices against a register file of `width` qubits and
    /// rejects gates whose wires repeat.
    pub fn validate(&self, width: usize) -> Result<()> {
        let mut seen = 0u64;
        for q in self.qubits() {
            if q.0 >= width {
                return Err(Error::QubitOutOfRange { index: q.0, width });
            }
            let bit = 1u64 << q.0;
            if seen & bit != 0 {
                return Err(Error::DuplicateQubit(q.0));
            }
            seen |= bit;
        }
        Ok(())
    }

    /// `(mask, value)` such that the controls fire on basis index `i` iff
    /// `i & mask == value`.
    pub(crate) fn control_pattern(&self) -> (usize, usize) {
        self.controls.iter().fold((0, 0), |(mask, value), c| {
            let bit = c.qubit.mask();
            (mask | bit, if c.positive { value | bit } else { value })
        })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Z => "Z",
        };
        let prefix = "C".repeat(self.controls.len());
        if self.controls.is_empty() {
            write!(f, "{name} {}", self.target)
        } else {
            let ctrls: Vec<String> = self.controls.iter().map(|c| c.to_string()).collect();
            write!(f, "{prefix}{name} [{}] -> {}", ctrls.join(","), self.target)
        }
    }
}
