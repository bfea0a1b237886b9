//! End-to-end edge detection: neighbourhood generation, gradient, register
//! reset, direction-aware shifting, thresholding and the final OR.
//!
//! Two execution modes exist. `PerDirection` runs the x and y passes on
//! independent fresh states and unions their readouts. `Composite` keeps a
//! single state through both passes, clearing the x-pass work registers in
//! between either coherently (`Unitary`) or by rewriting amplitudes
//! (`Hybrid`, simulation only).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::arith::{build_abs_subtractor, build_ladder_shift, RegisterRef, ShiftDirection};
use crate::error::{Error, Result};
use crate::image::{
    build_controlled_neqr, build_neqr_inverse, build_neqr_oracle, build_position_superposition,
    Axis, EdgeMap, GrayImage, RegisterLayout,
};
use crate::sim::{Circuit, Control, Gate, GateStats, StateVector, MAX_QUBITS};
use crate::threshold::{build_ftpo, build_qpa, Threshold};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    PerDirection,
    Composite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResetStrategy {
    Unitary,
    Hybrid,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::PerDirection => "per-direction",
            Mode::Composite => "composite",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-direction" => Ok(Mode::PerDirection),
            "composite" => Ok(Mode::Composite),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for ResetStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResetStrategy::Unitary => "unitary",
            ResetStrategy::Hybrid => "hybrid",
        })
    }
}

impl FromStr for ResetStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unitary" => Ok(ResetStrategy::Unitary),
            "hybrid" => Ok(ResetStrategy::Hybrid),
            other => Err(Error::InvalidArgument(format!(
                "unknown reset strategy `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PipelineConfig {
    pub threshold: Threshold,
    pub mode: Mode,
    pub reset: ResetStrategy,
    /// Amplitude magnitude below which a basis state counts as absent.
    pub tol: f64,
}

impl PipelineConfig {
    pub fn new(threshold: Threshold) -> Self {
        PipelineConfig {
            threshold,
            mode: Mode::PerDirection,
            reset: ResetStrategy::Unitary,
            tol: 1e-9,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_reset(mut self, reset: ResetStrategy) -> Self {
        self.reset = reset;
        self
    }
}

/// One basis state of the pipeline register file, decoded field by field.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchRecord {
    pub x: usize,
    pub y: usize,
    pub i1: u64,
    pub i2: u64,
    pub grad: u64,
    pub sign_x: bool,
    pub sign_y: bool,
    pub a1: bool,
    pub a2: bool,
    pub out_x: bool,
    pub out_y: bool,
    pub out: bool,
    pub amplitude: Complex64,
}

impl BranchRecord {
    pub fn sign(&self, axis: Axis) -> bool {
        match axis {
            Axis::X => self.sign_x,
            Axis::Y => self.sign_y,
        }
    }

    pub fn shift_ancilla(&self, axis: Axis) -> bool {
        match axis {
            Axis::X => self.a1,
            Axis::Y => self.a2,
        }
    }

    pub fn output(&self, axis: Axis) -> bool {
        match axis {
            Axis::X => self.out_x,
            Axis::Y => self.out_y,
        }
    }
}

/// Decodes every basis state with `|amplitude| > tol`.
pub fn decode_branches(
    state: &StateVector,
    layout: &RegisterLayout,
    tol: f64,
) -> Vec<BranchRecord> {
    let bit = |idx: usize, q: crate::sim::Qubit| idx & q.mask() != 0;
    state
        .enumerate_basis(tol)
        .into_iter()
        .map(|(idx, amplitude)| {
            let (x, y) = layout.decode_position(idx);
            BranchRecord {
                x,
                y,
                i1: layout.i1.read(idx),
                i2: layout.i2.read(idx),
                grad: layout.grad.read(idx),
                sign_x: bit(idx, layout.sign_x),
                sign_y: bit(idx, layout.sign_y),
                a1: bit(idx, layout.a1),
                a2: bit(idx, layout.a2),
                out_x: bit(idx, layout.out_x),
                out_y: bit(idx, layout.out_y),
                out: bit(idx, layout.out),
                amplitude,
            }
        })
        .collect()
}

fn host(layout: &RegisterLayout, name: &str) -> Circuit {
    Circuit::new(layout.num_qubits(), name)
}

/// `|x>|y>|0>|0> -> |x+1>|y>|I(x,y)>|I(x+1,y)>` (for `axis = X`).
pub fn build_neighborhood_stage(
    image: &GrayImage,
    layout: &RegisterLayout,
    axis: Axis,
) -> Result<Circuit> {
    let mut c = host(layout, "neighborhood");
    c.append(&build_neqr_oracle(image, &layout.x, &layout.y, &layout.i1)?)?;
    c.append(&build_neighbor_fetch_stage(image, layout, axis)?)?;
    Ok(c)
}

/// Ladder-up on the axis register, then NEQR into `I2`. Used alone for the
/// second axis of a composite run, where `I1` is already populated.
pub fn build_neighbor_fetch_stage(
    image: &GrayImage,
    layout: &RegisterLayout,
    axis: Axis,
) -> Result<Circuit> {
    let mut c = host(layout, "neighbor-fetch");
    c.append(&build_ladder_shift(
        layout.position(axis),
        ShiftDirection::Up,
        None,
    )?)?;
    c.append(&build_neqr_oracle(image, &layout.x, &layout.y, &layout.i2)?)?;
    Ok(c)
}

fn gradient_into(layout: &RegisterLayout, diff: &RegisterRef) -> Result<Circuit> {
    let mut c = host(layout, "gradient");
    for (src, dst) in layout.i1.qubits.iter().zip(&diff.qubits) {
        c.push(Gate::cx(*src, *dst))?;
    }
    c.append(&build_abs_subtractor(
        &layout.minuend(),
        diff,
        layout.carry,
    )?)?;
    Ok(c)
}

/// Copies `I1` into `grad`, then absolute-subtracts so that `grad` holds
/// `|I2 - I1|` and the axis sign bit holds `[I2 < I1]`.
pub fn build_gradient_stage(layout: &RegisterLayout, axis: Axis) -> Result<Circuit> {
    gradient_into(layout, &layout.difference(axis))
}

/// Clears `I2` with the inverse oracle (while the axis register still points
/// at the neighbour), then moves the axis register back.
pub fn build_reset_stage(
    image: &GrayImage,
    layout: &RegisterLayout,
    axis: Axis,
) -> Result<Circuit> {
    let mut c = host(layout, "reset");
    c.append(&build_neqr_inverse(
        image, &layout.x, &layout.y, &layout.i2,
    )?)?;
    c.append(&build_ladder_shift(
        layout.position(axis),
        ShiftDirection::Down,
        None,
    )?)?;
    Ok(c)
}

/// Sign-controlled move to the neighbour with `I1` re-encoded there.
fn relocate(
    image: &GrayImage,
    layout: &RegisterLayout,
    axis: Axis,
    direction: ShiftDirection,
) -> Result<Circuit> {
    let sign = layout.sign(axis);
    let mut c = host(layout, "relocate");
    c.append(
        &build_controlled_neqr(image, &layout.x, &layout.y, &layout.i1, sign)?
            .inverse()
            .with_name("c-NEQR\u{2020}"),
    )?;
    c.append(&build_ladder_shift(
        layout.position(axis),
        direction,
        Some(sign),
    )?)?;
    c.append(&build_controlled_neqr(
        image, &layout.x, &layout.y, &layout.i1, sign,
    )?)?;
    Ok(c)
}

/// Direction-aware shift. A branch with sign 1 becomes
/// `(|x, sign=0, a=1> - |x+1, sign=1, a=1>) / sqrt(2)`, the second term
/// carrying `I(x+1, y)` in `I1`. Sign-0 branches are untouched.
pub fn build_shift_stage(
    image: &GrayImage,
    layout: &RegisterLayout,
    axis: Axis,
) -> Result<Circuit> {
    let sign = layout.sign(axis);
    let anc = layout.shift_ancilla(axis);
    let mut c = host(layout, "shift");
    c.push(Gate::cx(sign, anc))?;
    c.push(Gate::ch(anc, sign))?;
    c.append(&relocate(image, layout, axis, ShiftDirection::Up)?)?;
    Ok(c)
}

/// Writes `[|grad| > T]` into the axis output flag, then clears it again on
/// the in-place duplicate (`sign = 0, a = 1`), which is never an edge.
pub fn build_threshold_stage(
    layout: &RegisterLayout,
    threshold: Threshold,
    axis: Axis,
) -> Result<Circuit> {
    let out = layout.output(axis);
    let mut c = host(layout, "threshold");
    c.append(&build_qpa(threshold, &layout.grad, out)?)?;

    let mask = [
        Control::on(out),
        Control::off(layout.sign(axis)),
        Control::on(layout.shift_ancilla(axis)),
    ];
    let mut fix = host(layout, "non-edge-mask");
    fix.push(Gate::h(out))?;
    fix.append(&build_ftpo(threshold, &layout.grad, &mask)?)?;
    fix.push(Gate::h(out))?;
    c.append(&fix)?;
    Ok(c)
}

/// Reversible OR of the two axis flags into `out`.
pub fn build_or_stage(layout: &RegisterLayout) -> Result<Circuit> {
    let (ox, oy, o) = (layout.out_x, layout.out_y, layout.out);
    let mut c = host(layout, "OR");
    c.push(Gate::x(ox))?;
    c.push(Gate::x(oy))?;
    c.push(Gate::ccx(ox, oy, o))?;
    c.push(Gate::x(o))?;
    c.push(Gate::x(ox))?;
    c.push(Gate::x(oy))?;
    Ok(c)
}

/// OR used when both axes share one state. A branch moved by the y shift
/// carries the x flag of the pixel it left, so that flag is ignored there;
/// the destination pixel's own branch supplies its x flag.
pub fn build_composite_or_stage(layout: &RegisterLayout) -> Result<Circuit> {
    let (ox, oy, o) = (layout.out_x, layout.out_y, layout.out);
    let (sy, a2) = (layout.sign_y, layout.a2);
    let mut c = host(layout, "OR-composite");
    c.push(Gate::cx(oy, o))?;
    c.push(Gate::mcx(
        vec![Control::on(ox), Control::off(oy), Control::off(sy)],
        o,
    ))?;
    c.push(Gate::mcx(
        vec![
            Control::on(ox),
            Control::off(oy),
            Control::on(sy),
            Control::off(a2),
        ],
        o,
    ))?;
    Ok(c)
}

fn moved_by_y(layout: &RegisterLayout, idx: usize) -> bool {
    let m = layout.sign_y.mask() | layout.a2.mask();
    idx & m == m
}

/// Coherent clean-up of one finished axis pass: returns `grad`, the shift
/// ancilla and `I2` to `|0>` while the sign bit stays behind as a label of
/// the shifted branches.
///
/// Shifted branches are first moved back to the start of their pixel pair,
/// where the shift ancilla equals the true sign of the difference. The
/// gradient is then uncomputed using that ancilla as the sign bit, and the
/// shifted branches are moved forward again.
pub fn build_axis_uncompute(
    image: &GrayImage,
    layout: &RegisterLayout,
    axis: Axis,
) -> Result<Circuit> {
    let anc = layout.shift_ancilla(axis);
    let diff = layout.grad.extended(anc).with_name("diff_anc");
    let mut c = host(layout, "axis-uncompute");
    c.append(&relocate(image, layout, axis, ShiftDirection::Up)?.inverse())?;
    c.append(&build_neighbor_fetch_stage(image, layout, axis)?)?;
    c.append(&gradient_into(layout, &diff)?.inverse())?;
    c.append(&build_reset_stage(image, layout, axis)?)?;
    c.append(&relocate(image, layout, axis, ShiftDirection::Up)?)?;
    Ok(c)
}

/// The circuits of one axis pass, in execution order.
#[derive(Clone, Debug)]
pub struct AxisStages {
    pub neighborhood: Circuit,
    pub gradient: Circuit,
    pub reset: Circuit,
    pub shift: Circuit,
    pub threshold: Circuit,
}

impl AxisStages {
    pub fn build(
        image: &GrayImage,
        layout: &RegisterLayout,
        threshold: Threshold,
        axis: Axis,
    ) -> Result<Self> {
        Ok(AxisStages {
            neighborhood: build_neighborhood_stage(image, layout, axis)?,
            gradient: build_gradient_stage(layout, axis)?,
            reset: build_reset_stage(image, layout, axis)?,
            shift: build_shift_stage(image, layout, axis)?,
            threshold: build_threshold_stage(layout, threshold, axis)?,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = &Circuit> {
        [
            &self.neighborhood,
            &self.gradient,
            &self.reset,
            &self.shift,
            &self.threshold,
        ]
        .into_iter()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunStats {
    pub qubit_count: usize,
    pub gates: GateStats,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub edges: EdgeMap,
    pub edge_x: EdgeMap,
    pub edge_y: EdgeMap,
    pub stats: RunStats,
}

/// Fails with a budget error if the image does not fit the simulator.
pub fn layout_for(image: &GrayImage) -> Result<RegisterLayout> {
    let required = RegisterLayout::required_qubits(image.side_log2(), image.bit_depth());
    if required > MAX_QUBITS {
        return Err(Error::Budget {
            required,
            max: MAX_QUBITS,
        });
    }
    Ok(RegisterLayout::new(image.side_log2(), image.bit_depth()))
}

/// Errors if any basis state with a nonzero bit in `mask` has
/// `|amplitude| > tol`.
pub fn check_cleared(state: &StateVector, mask: usize, tol: f64, what: &str) -> Result<()> {
    let worst = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i & mask != 0)
        .map(|(_, a)| a.norm())
        .fold(0.0, f64::max);
    if worst > tol {
        return Err(Error::Consistency(format!(
            "{what}: residual amplitude {worst:.3e} exceeds tolerance {tol:.1e}"
        )));
    }
    Ok(())
}

fn scratch_mask(layout: &RegisterLayout) -> usize {
    layout.i2.mask() | layout.ext.mask() | layout.carry.mask()
}

/// Positions of all branches with `flag = 1`.
pub fn read_flag(
    state: &StateVector,
    layout: &RegisterLayout,
    flag: crate::sim::Qubit,
    tol: f64,
) -> EdgeMap {
    read_where(state, layout, tol, |idx| idx & flag.mask() != 0)
}

fn read_where(
    state: &StateVector,
    layout: &RegisterLayout,
    tol: f64,
    pred: impl Fn(usize) -> bool,
) -> EdgeMap {
    let mut map = EdgeMap::empty(layout.side_log2);
    for (idx, _) in state.enumerate_basis(tol) {
        if pred(idx) {
            let (x, y) = layout.decode_position(idx);
            map.set(x, y, true);
        }
    }
    map
}

fn run_axis_pass(
    image: &GrayImage,
    layout: &RegisterLayout,
    config: &PipelineConfig,
    axis: Axis,
) -> Result<(EdgeMap, GateStats)> {
    let stages = AxisStages::build(image, layout, config.threshold, axis)?;
    let prep = build_position_superposition(layout)?;
    let mut state = StateVector::new_zero(layout.num_qubits())?;
    let mut full = host(layout, &format!("pass-{axis}"));
    full.append(&prep)?;
    for c in stages.iter() {
        full.append(c)?;
    }

    state.apply_circuit(&prep)?;
    state.apply_circuit(&stages.neighborhood)?;
    state.apply_circuit(&stages.gradient)?;
    state.apply_circuit(&stages.reset)?;
    check_cleared(
        &state,
        scratch_mask(layout),
        config.tol,
        "after reset stage",
    )?;
    state.apply_circuit(&stages.shift)?;
    state.apply_circuit(&stages.threshold)?;
    Ok((
        read_flag(&state, layout, layout.output(axis), config.tol),
        full.stats(),
    ))
}

/// Merges basis states that coincide once the bits in `mask` are zeroed,
/// keeping total probability: the merged amplitude is the square root of the
/// summed probabilities. Only meaningful under simulation.
pub fn hybrid_clear(state: &mut StateVector, mask: usize) {
    let mut merged: HashMap<usize, f64> = HashMap::new();
    let amps = state.amplitudes_mut();
    for (idx, a) in amps.iter_mut().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            *merged.entry(idx & !mask).or_insert(0.0) += p;
        }
        *a = Complex64::new(0.0, 0.0);
    }
    for (idx, p) in merged {
        amps[idx] = Complex64::new(p.sqrt(), 0.0);
    }
}

fn run_composite(
    image: &GrayImage,
    layout: &RegisterLayout,
    config: &PipelineConfig,
) -> Result<RunOutput> {
    let tol = config.tol;
    let x = AxisStages::build(image, layout, config.threshold, Axis::X)?;
    let y_fetch = build_neighbor_fetch_stage(image, layout, Axis::Y)?;
    let y_grad = build_gradient_stage(layout, Axis::Y)?;
    let y_reset = build_reset_stage(image, layout, Axis::Y)?;
    let y_shift = build_shift_stage(image, layout, Axis::Y)?;
    let y_thresh = build_threshold_stage(layout, config.threshold, Axis::Y)?;
    let or = build_composite_or_stage(layout)?;
    let prep = build_position_superposition(layout)?;

    let mut full = host(layout, "composite");
    full.append(&prep)?;
    for c in x.iter() {
        full.append(c)?;
    }

    let mut state = StateVector::new_zero(layout.num_qubits())?;
    state.apply_circuit(&prep)?;
    state.apply_circuit(&x.neighborhood)?;
    state.apply_circuit(&x.gradient)?;
    state.apply_circuit(&x.reset)?;
    check_cleared(&state, scratch_mask(layout), tol, "after x reset stage")?;
    state.apply_circuit(&x.shift)?;
    state.apply_circuit(&x.threshold)?;

    let work = layout.grad.mask() | layout.a1.mask() | scratch_mask(layout);
    match config.reset {
        ResetStrategy::Unitary => {
            let uncompute = build_axis_uncompute(image, layout, Axis::X)?;
            state.apply_circuit(&uncompute)?;
            full.append(&uncompute)?;
            check_cleared(&state, work, tol, "after x-pass uncompute")?;
        }
        ResetStrategy::Hybrid => {
            hybrid_clear(&mut state, work | layout.sign_x.mask());
        }
    }

    for c in [&y_fetch, &y_grad, &y_reset] {
        state.apply_circuit(c)?;
        full.append(c)?;
    }
    check_cleared(&state, scratch_mask(layout), tol, "after y reset stage")?;
    for c in [&y_shift, &y_thresh, &or] {
        state.apply_circuit(c)?;
        full.append(c)?;
    }

    Ok(RunOutput {
        edges: read_flag(&state, layout, layout.out, tol),
        edge_x: read_where(&state, layout, tol, |idx| {
            idx & layout.out_x.mask() != 0 && !moved_by_y(layout, idx)
        }),
        edge_y: read_flag(&state, layout, layout.out_y, tol),
        stats: RunStats {
            qubit_count: layout.num_qubits(),
            gates: full.stats(),
        },
    })
}

/// Runs the full detector on `image`.
pub fn run(image: &GrayImage, config: &PipelineConfig) -> Result<RunOutput> {
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "readout tolerance must be positive, got {}",
            config.tol
        )));
    }
    if config.threshold.width() != image.bit_depth() {
        return Err(Error::WidthMismatch {
            what: "threshold width vs image bit depth",
            left: config.threshold.width(),
            right: image.bit_depth(),
        });
    }
    let layout = layout_for(image)?;
    match config.mode {
        Mode::PerDirection => {
            let (rx, ry) = rayon::join(
                || run_axis_pass(image, &layout, config, Axis::X),
                || run_axis_pass(image, &layout, config, Axis::Y),
            );
            let (edge_x, sx) = rx?;
            let (edge_y, sy) = ry?;
            Ok(RunOutput {
                edges: edge_x.union(&edge_y),
                edge_x,
                edge_y,
                stats: RunStats {
                    qubit_count: layout.num_qubits(),
                    gates: sx.merge_parallel(sy),
                },
            })
        }
        Mode::Composite => run_composite(image, &layout, config),
    }
}
