//! Classical implementation of the edge rule, written without touching the
//! circuit code. It is the oracle the quantum pipeline is checked against.
//!
//! For each axis and every pixel `cur` with cyclic successor `next`:
//! `d = I(next) - I(cur)`; the candidate pixel is `next` when `d < 0` and
//! `cur` otherwise, and it is marked when `|d| > T`. Marks from both axes
//! are OR-ed together.

use crate::image::{Axis, EdgeMap, GrayImage};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceResult {
    pub grad_x: Vec<Vec<i32>>,
    pub grad_y: Vec<Vec<i32>>,
    pub edge_x: EdgeMap,
    pub edge_y: EdgeMap,
    pub edge: EdgeMap,
}

fn successor(side: usize, row: usize, col: usize, axis: Axis) -> (usize, usize) {
    match axis {
        Axis::X => ((row + 1) % side, col),
        Axis::Y => (row, (col + 1) % side),
    }
}

/// Signed cyclic forward differences `I(next) - I(cur)`, indexed `[row][col]`.
pub fn reference_gradients(image: &GrayImage, axis: Axis) -> Vec<Vec<i32>> {
    let side = image.side();
    (0..side)
        .map(|row| {
            (0..side)
                .map(|col| {
                    let (nr, nc) = successor(side, row, col, axis);
                    i32::from(image.get(nr, nc)) - i32::from(image.get(row, col))
                })
                .collect()
        })
        .collect()
}

fn axis_edges(image: &GrayImage, grad: &[Vec<i32>], axis: Axis, threshold: u64) -> EdgeMap {
    let side = image.side();
    let mut map = EdgeMap::empty(image.side_log2());
    for (row, line) in grad.iter().enumerate() {
        for (col, &d) in line.iter().enumerate() {
            if u64::from(d.unsigned_abs()) <= threshold {
                continue;
            }
            let (r, c) = if d < 0 {
                successor(side, row, col, axis)
            } else {
                (row, col)
            };
            map.set(r, c, true);
        }
    }
    map
}

pub fn reference_edge_map(image: &GrayImage, threshold: u64) -> ReferenceResult {
    let grad_x = reference_gradients(image, Axis::X);
    let grad_y = reference_gradients(image, Axis::Y);
    let edge_x = axis_edges(image, &grad_x, Axis::X, threshold);
    let edge_y = axis_edges(image, &grad_y, Axis::Y, threshold);
    let edge = edge_x.union(&edge_y);
    ReferenceResult {
        grad_x,
        grad_y,
        edge_x,
        edge_y,
        edge,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn img(rows: &[Vec<u16>], q: usize) -> GrayImage {
        GrayImage::from_rows(rows, q).unwrap()
    }

    #[test]
    fn constant_image_has_no_edges() {
        let i = img(&[vec![2, 2], vec![2, 2]], 2);
        let r = reference_edge_map(&i, 0);
        assert_eq!(r.edge.count(), 0);
        assert!(r.grad_x.iter().flatten().all(|&d| d == 0));
    }

    #[test]
    fn pair_marks_dark_pixel_from_both_sides() {
        // one row pair along y: (0, 3); forward d = +3 at col 0, wrap d = -3
        // at col 1 whose successor is col 0
        let i = img(&[vec![0, 3], vec![0, 3]], 2);
        let r = reference_edge_map(&i, 2);
        assert_eq!(r.grad_y[0], vec![3, -3]);
        assert_eq!(r.edge_y.positions(), vec![(0, 0), (1, 0)]);
        assert_eq!(r.edge_x.count(), 0);
    }

    #[test]
    fn ceiling_threshold_marks_nothing() {
        let i = img(&[vec![0, 3], vec![3, 0]], 2);
        assert_eq!(reference_edge_map(&i, 3).edge.count(), 0);
    }

    #[test]
    fn gradient_pattern() {
        let i = img(&[vec![0, 1], vec![2, 3]], 2);
        assert_eq!(
            reference_gradients(&i, Axis::X),
            vec![vec![2, 2], vec![-2, -2]]
        );
        assert_eq!(
            reference_gradients(&i, Axis::Y),
            vec![vec![1, -1], vec![1, -1]]
        );
    }

    fn image_strategy() -> impl Strategy<Value = GrayImage> {
        (1usize..=3, 1usize..=4).prop_flat_map(|(n, q)| {
            proptest::collection::vec(0u16..(1 << q), 1 << (2 * n))
                .prop_map(move |px| GrayImage::new(n, q, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn cyclic_differences_telescope(image in image_strategy()) {
            let gx = reference_gradients(&image, Axis::X);
            let gy = reference_gradients(&image, Axis::Y);
            for row in &gy {
                prop_assert_eq!(row.iter().sum::<i32>(), 0);
            }
            for col in 0..image.side() {
                prop_assert_eq!(gx.iter().map(|r| r[col]).sum::<i32>(), 0);
            }
        }

        #[test]
        fn edges_shrink_as_threshold_grows(image in image_strategy(), t1 in 0u64..16, dt in 0u64..16) {
            let low = reference_edge_map(&image, t1).edge;
            let high = reference_edge_map(&image, t1 + dt).edge;
            for (h, l) in high.bits().iter().zip(low.bits()) {
                prop_assert!(!h || *l);
            }
        }

        #[test]
        fn marked_pixel_is_the_darker_of_its_pair(image in image_strategy(), t in 0u64..8) {
            let r = reference_edge_map(&image, t);
            let side = image.side();
            for (axis, map) in [(Axis::X, &r.edge_x), (Axis::Y, &r.edge_y)] {
                for (row, col) in map.positions() {
                    let here = image.get(row, col);
                    let (nr, nc) = successor(side, row, col, axis);
                    let (pr, pc) = match axis {
                        Axis::X => ((row + side - 1) % side, col),
                        Axis::Y => (row, (col + side - 1) % side),
                    };
                    let fwd = image.get(nr, nc);
                    let back = image.get(pr, pc);
                    let fwd_edge = u64::from(fwd.abs_diff(here)) > t && here <= fwd;
                    let back_edge = u64::from(back.abs_diff(here)) > t && here < back;
                    prop_assert!(fwd_edge || back_edge);
                }
            }
        }
    }
}
