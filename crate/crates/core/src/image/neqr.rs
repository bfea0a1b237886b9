use super::{GrayImage, RegisterLayout};
use crate::arith::RegisterRef;
use crate::error::{Error, Result};
use crate::sim::{Circuit, Control, Gate, Qubit};

/// Hadamard on every position qubit: uniform superposition over all pixels.
pub fn build_position_superposition(layout: &RegisterLayout) -> Result<Circuit> {
    let mut c = Circuit::new(layout.num_qubits(), "H-pos");
    for q in layout.x.qubits.iter().chain(&layout.y.qubits) {
        c.push(Gate::h(*q))?;
    }
    Ok(c)
}

fn position_controls(x: &RegisterRef, y: &RegisterRef, row: usize, col: usize) -> Vec<Control> {
    let bit = |reg: &RegisterRef, value: usize| {
        reg.qubits
            .iter()
            .enumerate()
            .map(move |(k, q)| {
                if (value >> k) & 1 == 1 {
                    Control::on(*q)
                } else {
                    Control::off(*q)
                }
            })
            .collect::<Vec<_>>()
    };
    let mut ctrls = bit(x, row);
    ctrls.extend(bit(y, col));
    ctrls
}

/// `|x>|y>|t> -> |x>|y>|t XOR I(x,y)>`.
///
/// One X per set intensity bit per pixel, controlled on the full position
/// pattern (negative controls for zero bits). Depth `O(q * 4^n)`.
pub fn build_neqr_oracle(
    image: &GrayImage,
    x: &RegisterRef,
    y: &RegisterRef,
    target: &RegisterRef,
) -> Result<Circuit> {
    build_neqr_with_controls(image, x, y, target, &[])
}

/// The adjoint oracle. Each gate is self-inverse and all gates commute, but
/// the reversed list is emitted so listings mirror the forward oracle.
pub fn build_neqr_inverse(
    image: &GrayImage,
    x: &RegisterRef,
    y: &RegisterRef,
    target: &RegisterRef,
) -> Result<Circuit> {
    Ok(build_neqr_oracle(image, x, y, target)?
        .inverse()
        .with_name("NEQR\u{2020}"))
}

/// The oracle with every gate additionally controlled on `control = |1>`.
pub fn build_controlled_neqr(
    image: &GrayImage,
    x: &RegisterRef,
    y: &RegisterRef,
    target: &RegisterRef,
    control: Qubit,
) -> Result<Circuit> {
    Ok(build_neqr_with_controls(image, x, y, target, &[Control::on(control)])?.with_name("c-NEQR"))
}

fn build_neqr_with_controls(
    image: &GrayImage,
    x: &RegisterRef,
    y: &RegisterRef,
    target: &RegisterRef,
    extra: &[Control],
) -> Result<Circuit> {
    let n = image.side_log2();
    if x.width() != n || y.width() != n {
        return Err(Error::WidthMismatch {
            what: "position registers vs image side",
            left: x.width().max(y.width()),
            right: n,
        });
    }
    if target.width() != image.bit_depth() {
        return Err(Error::WidthMismatch {
            what: "intensity register vs image bit depth",
            left: target.width(),
            right: image.bit_depth(),
        });
    }
    let width = x
        .qubits
        .iter()
        .chain(&y.qubits)
        .chain(&target.qubits)
        .map(|q| q.0)
        .chain(extra.iter().map(|c| c.qubit.0))
        .max()
        .map_or(0, |m| m + 1);
    let mut c = Circuit::new(width, "NEQR");
    let side = image.side();
    for row in 0..side {
        for col in 0..side {
            let value = image.get(row, col);
            if value == 0 {
                continue;
            }
            let mut ctrls = position_controls(x, y, row, col);
            ctrls.extend_from_slice(extra);
            for (bit, t) in target.qubits.iter().enumerate() {
                if (value >> bit) & 1 == 1 {
                    c.push(Gate::mcx(ctrls.clone(), *t))?;
                }
            }
        }
    }
    Ok(c)
}
