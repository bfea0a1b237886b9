#![allow(dead_code)]

use qedge::image::GrayImage;
use qedge::sim::{Circuit, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut ChaCha8Rng, n: usize, q: usize) -> GrayImage {
    let pixels = (0..1usize << (2 * n))
        .map(|_| rng.gen_range(0..1u16 << q))
        .collect();
    GrayImage::new(n, q, pixels).unwrap()
}

/// Runs `circuit` on `|index>` through the statevector and returns the
/// single output basis index, or `None` if the output is not a basis state.
pub fn basis_image(circuit: &Circuit, index: usize) -> Option<usize> {
    let mut s = StateVector::new_basis(circuit.num_qubits(), index).unwrap();
    s.apply_circuit(circuit).unwrap();
    let hits = s.enumerate_basis(1e-9);
    match hits.as_slice() {
        [(i, a)] if (a.norm() - 1.0).abs() < 1e-9 => Some(*i),
        _ => None,
    }
}
