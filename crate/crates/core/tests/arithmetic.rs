mod common;

use common::basis_image;
use proptest::prelude::*;
use qedge::arith::{
    build_abs_subtractor, build_ladder_shift, build_qrca, build_subtractor, AdderLayout,
    RegisterRef, ShiftDirection,
};
use qedge::sim::Qubit;
use qedge::threshold::{build_qrca_comparator, classify_bruteforce, ComparatorLayout, Threshold};

fn reg(name: &str, start: usize, width: usize) -> RegisterRef {
    RegisterRef::contiguous(name, start, width)
}

fn adder(n: usize) -> AdderLayout {
    AdderLayout {
        a: reg("a", 0, n),
        b: reg("b", n, n),
        carry_in: Qubit(2 * n),
        carry_out: None,
    }
}

proptest! {
    #[test]
    fn wide_adder_matches_u64(n in 6usize..=10, x in any::<u64>(), y in any::<u64>()) {
        let m = (1u64 << n) - 1;
        let (x, y) = (x & m, y & m);
        let l = adder(n);
        let out = basis_image(&build_qrca(&l).unwrap(), l.b.write(l.a.write(0, x), y)).unwrap();
        prop_assert_eq!(l.b.read(out), (x + y) & m);
        prop_assert_eq!(l.a.read(out), x);
    }

    #[test]
    fn subtractor_wraps(n in 1usize..=6, x in any::<u64>(), y in any::<u64>()) {
        let m = (1u64 << n) - 1;
        let (x, y) = (x & m, y & m);
        let l = adder(n);
        let out = basis_image(&build_subtractor(&l).unwrap(), l.b.write(l.a.write(0, x), y)).unwrap();
        prop_assert_eq!(l.b.read(out), x.wrapping_sub(y) & m);
    }

    #[test]
    fn abs_subtractor_wide(q in 5usize..=7, x in any::<u64>(), y in any::<u64>()) {
        let m = (1u64 << q) - 1;
        let (x, y) = (x & m, y & m);
        let a = reg("a", 0, q + 1);
        let b = reg("b", q + 1, q + 1);
        let c = build_abs_subtractor(&a, &b, Qubit(2 * q + 2)).unwrap();
        let out = basis_image(&c, b.write(a.write(0, x), y)).unwrap();
        prop_assert_eq!(b.low(q).read(out), x.abs_diff(y));
        prop_assert_eq!(out & b.msb().unwrap().mask() != 0, x < y);
    }

    #[test]
    fn ladder_up_then_down(n in 1usize..=6, x in any::<u64>()) {
        let x = x & ((1 << n) - 1);
        let pos = reg("x", 0, n);
        let up = build_ladder_shift(&pos, ShiftDirection::Up, None).unwrap();
        let down = build_ladder_shift(&pos, ShiftDirection::Down, None).unwrap();
        let moved = basis_image(&up, x as usize).unwrap();
        prop_assert_eq!(moved as u64, (x + 1) % (1 << n));
        prop_assert_eq!(basis_image(&down, moved).unwrap() as u64, x);
    }

    #[test]
    fn controlled_ladder_waits_for_control(n in 1usize..=5, x in any::<u64>(), on in any::<bool>()) {
        let x = (x & ((1 << n) - 1)) as usize;
        let pos = reg("x", 0, n);
        let ctrl = Qubit(n);
        let c = build_ladder_shift(&pos, ShiftDirection::Up, Some(ctrl)).unwrap();
        let start = x | if on { ctrl.mask() } else { 0 };
        let out = basis_image(&c, start).unwrap();
        let want = if on { ((x + 1) % (1 << n)) | ctrl.mask() } else { x };
        prop_assert_eq!(out, want);
    }
}

#[test]
fn comparator_agrees_with_threshold_rule() {
    for q in 1..=4usize {
        let layout = ComparatorLayout {
            grad: reg("g", 0, q),
            t_reg: reg("t", q, q),
            sign_out: Qubit(2 * q),
            ext: Qubit(2 * q + 1),
            carry: Qubit(2 * q + 2),
        };
        for t in 0..1u64 << q {
            let th = Threshold::new(t, q).unwrap();
            let c = build_qrca_comparator(th, &layout).unwrap();
            for s in 0..1u64 << q {
                let out = basis_image(&c, s as usize).unwrap();
                let above = out & layout.sign_out.mask() != 0;
                assert_eq!(
                    above,
                    classify_bruteforce(s, th).unwrap(),
                    "q={q} T={t} s={s}"
                );
                assert_eq!(layout.grad.read(out), s);
            }
        }
    }
}

#[test]
fn ladder_rejects_control_inside_register() {
    let pos = reg("x", 0, 3);
    assert!(build_ladder_shift(&pos, ShiftDirection::Up, Some(Qubit(1))).is_err());
}
