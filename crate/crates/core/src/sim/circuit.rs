use std::fmt;

use serde::Serialize;

use super::gate::{Control, Gate, GateKind};
use crate::error::{Error, Result};

/// A named span of gates inside a circuit, recorded when a sub-circuit is
/// appended. Spans may nest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

/// Ordered gate list over a fixed register file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    name: String,
    gates: Vec<Gate>,
    blocks: Vec<Block>,
}

/// Resource summary over the literal gate list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateStats {
    pub total_gates: usize,
    /// Z-family gates of any control arity (including none).
    pub phase_gates: usize,
    /// Phase gates plus X/H gates with two or more controls.
    pub multi_controlled_count: usize,
    pub max_control_arity: usize,
    /// Longest chain of gates sharing a qubit, every gate counted as 1.
    pub depth: usize,
    /// Same chain length with each gate weighted by [`decomposed_depth`].
    pub decomposed_depth: usize,
}

impl GateStats {
    /// Combines the stats of circuits that run on independent states.
    pub fn merge_parallel(self, other: GateStats) -> GateStats {
        GateStats {
            total_gates: self.total_gates + other.total_gates,
            phase_gates: self.phase_gates + other.phase_gates,
            multi_controlled_count: self.multi_controlled_count + other.multi_controlled_count,
            max_control_arity: self.max_control_arity.max(other.max_control_arity),
            depth: self.depth.max(other.depth),
            decomposed_depth: self.decomposed_depth.max(other.decomposed_depth),
        }
    }
}

/// Clifford+T depth model for a gate with `k` controls: a balanced AND-tree
/// over the controls, the core gate, then the mirrored uncompute tree.
pub fn decomposed_depth(controls: usize) -> usize {
    if controls <= 1 {
        1
    } else {
        2 * ceil_log2(controls) + 1
    }
}

fn ceil_log2(k: usize) -> usize {
    (usize::BITS - (k - 1).leading_zeros()) as usize
}

impl Circuit {
    pub fn new(num_qubits: usize, name: impl Into<String>) -> Self {
        Circuit {
            num_qubits,
            name: name.into(),
            gates: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of recorded blocks carrying `name`.
    pub fn count_blocks(&self, name: &str) -> usize {
        self.blocks.iter().filter(|b| b.name == name).count()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends `other` and records it as a block named after it.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits > self.num_qubits {
            return Err(Error::WidthMismatch {
                what: "appended circuit is wider than host",
                left: other.num_qubits,
                right: self.num_qubits,
            });
        }
        let offset = self.gates.len();
        self.gates.extend_from_slice(&other.gates);
        self.blocks.push(Block {
            name: other.name.clone(),
            start: offset,
            len: other.gates.len(),
        });
        self.blocks.extend(other.blocks.iter().map(|b| Block {
            name: b.name.clone(),
            start: b.start + offset,
            len: b.len,
        }));
        Ok(())
    }

    /// Exact inverse. Every gate kind is self-inverse, so this is the
    /// reversed gate list.
    pub fn inverse(&self) -> Circuit {
        let total = self.gates.len();
        let mut gates = self.gates.clone();
        gates.reverse();
        let blocks = self
            .blocks
            .iter()
            .map(|b| Block {
                name: format!("{}\u{2020}", b.name),
                start: total - b.start - b.len,
                len: b.len,
            })
            .collect();
        Circuit {
            num_qubits: self.num_qubits,
            name: format!("{}\u{2020}", self.name),
            gates,
            blocks,
        }
    }

    /// Every gate gains `extra` as additional controls.
    pub fn controlled_by(&self, extra: &[Control]) -> Result<Circuit> {
        let width = extra
            .iter()
            .map(|c| c.qubit.0 + 1)
            .fold(self.num_qubits, usize::max);
        let mut out = Circuit::new(width, format!("c-{}", self.name));
        for g in &self.gates {
            out.push(g.with_controls(extra))?;
        }
        out.blocks = self
            .blocks
            .iter()
            .map(|b| Block {
                name: format!("c-{}", b.name),
                ..b.clone()
            })
            .collect();
        Ok(out)
    }

    /// Classical action on a basis state for circuits built from X and Z
    /// gates only: returns the image index and whether its phase is negated.
    /// `None` when the circuit contains a Hadamard.
    pub fn permute_basis(&self, index: usize) -> Option<(usize, bool)> {
        let mut idx = index;
        let mut negated = false;
        for g in &self.gates {
            let (mask, value) = g.control_pattern();
            if idx & mask != value {
                continue;
            }
            match g.kind {
                GateKind::X => idx ^= g.target.mask(),
                GateKind::Z => negated ^= idx & g.target.mask() != 0,
                GateKind::H => return None,
            }
        }
        Some((idx, negated))
    }

    pub fn stats(&self) -> GateStats {
        let mut stats = GateStats {
            total_gates: self.gates.len(),
            ..GateStats::default()
        };
        let mut level = vec![0usize; self.num_qubits];
        let mut weighted = vec![0usize; self.num_qubits];
        for g in &self.gates {
            let arity = g.arity();
            if g.kind == GateKind::Z {
                stats.phase_gates += 1;
            }
            if g.kind == GateKind::Z || arity >= 2 {
                stats.multi_controlled_count += 1;
            }
            stats.max_control_arity = stats.max_control_arity.max(arity);

            let start = g.qubits().map(|q| level[q.0]).max().unwrap_or(0) + 1;
            let wstart =
                g.qubits().map(|q| weighted[q.0]).max().unwrap_or(0) + decomposed_depth(arity);
            for q in g.qubits() {
                level[q.0] = start;
                weighted[q.0] = wstart;
            }
        }
        stats.depth = level.into_iter().max().unwrap_or(0);
        stats.decomposed_depth = weighted.into_iter().max().unwrap_or(0);
        stats
    }
}

impl fmt::Display for Circuit {
    /// One gate per line, with block openings interleaved as `# name` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "circuit {} ({} qubits, {} gates)",
            self.name,
            self.num_qubits,
            self.gates.len()
        )?;
        for (i, g) in self.gates.iter().enumerate() {
            for b in self.blocks.iter().filter(|b| b.start == i && b.len > 0) {
                writeln!(f, "  # {} [{}..{})", b.name, b.start, b.start + b.len)?;
            }
            writeln!(f, "  {i:>5}: {g}")?;
        }
        Ok(())
    }
}
