//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! non-zero if any fails.

mod common;

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::{Duration, Instant};

use common::{basis_image, random_image, rng};
use qedge::arith::{build_abs_subtractor, build_qrca, build_s2c, AdderLayout, RegisterRef};
use qedge::image::{
    build_neqr_inverse, build_neqr_oracle, build_position_superposition, edge_map_to_pgm, Axis,
    GrayImage, RegisterLayout,
};
use qedge::pipeline::{
    build_gradient_stage, build_neighborhood_stage, build_reset_stage, build_shift_stage,
    decode_branches, run, Mode, PipelineConfig,
};
use qedge::reference::reference_edge_map;
use qedge::sim::{Circuit, Control, Gate, Qubit, StateVector};
use qedge::threshold::{build_ftpo, build_qpa, Threshold};

type Outcome = Result<String, String>;

/// Name, check, time limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn reg(name: &str, start: usize, width: usize) -> RegisterRef {
    RegisterRef::contiguous(name, start, width)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn qrca_exhaustive() -> Outcome {
    let mut cases = 0;
    for n in 1..=5usize {
        let a = reg("a", 0, n);
        let b = reg("b", n, n);
        let layout = AdderLayout {
            a: a.clone(),
            b: b.clone(),
            carry_in: Qubit(2 * n),
            carry_out: Some(Qubit(2 * n + 1)),
        };
        let c = build_qrca(&layout).map_err(|e| e.to_string())?;
        for x in 0..1u64 << n {
            for y in 0..1u64 << n {
                let idx = b.write(a.write(0, x), y);
                let out = basis_image(&c, idx).ok_or("adder left a superposition")?;
                let sum = x + y;
                ensure(a.read(out) == x, || format!("n={n}: a changed for {x}+{y}"))?;
                ensure(b.read(out) == sum & ((1 << n) - 1), || {
                    format!("n={n}: {x}+{y} wrong sum")
                })?;
                ensure((out >> (2 * n)) as u64 == (sum >> n) << 1, || {
                    format!("n={n}: {x}+{y} wrong carry")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases, n <= 5"))
}

fn s2c_involution() -> Outcome {
    let mut cases = 0;
    for q in 1..=6usize {
        let r = reg("y", 0, q);
        let c = build_s2c(&r).map_err(|e| e.to_string())?;
        let mut twice = c.clone();
        twice.append(&c).map_err(|e| e.to_string())?;
        let modulus = 1u64 << q;
        for y in 0..modulus {
            let out = basis_image(&c, y as usize).ok_or("not a permutation")?;
            ensure(out as u64 == (modulus - y) % modulus, || {
                format!("q={q}: S2C({y}) = {out}")
            })?;
            ensure(basis_image(&twice, y as usize) == Some(y as usize), || {
                format!("q={q}: S2C twice moved {y}")
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} values, q <= 6"))
}

fn abs_subtractor() -> Outcome {
    let mut cases = 0;
    for q in 1..=4usize {
        let a = reg("a", 0, q + 1);
        let b = reg("b", q + 1, q + 1);
        let carry = Qubit(2 * q + 2);
        let c = build_abs_subtractor(&a, &b, carry).map_err(|e| e.to_string())?;
        for alpha in 0..1u64 << q {
            for beta in 0..1u64 << q {
                let out =
                    basis_image(&c, b.write(a.write(0, alpha), beta)).ok_or("not a permutation")?;
                let mag = b.low(q).read(out);
                let sign = out & b.msb().unwrap().mask() != 0;
                ensure(mag == alpha.abs_diff(beta), || {
                    format!("q={q}: |{alpha}-{beta}| gave {mag}")
                })?;
                ensure(sign == (alpha < beta), || {
                    format!("q={q}: sign wrong for {alpha},{beta}")
                })?;
                ensure(a.read(out) == alpha && out & carry.mask() == 0, || {
                    format!("q={q}: operand or carry disturbed for {alpha},{beta}")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} pairs, q <= 4 ({} at q = 4)", 256))
}

fn uniform(q: usize) -> StateVector {
    let mut s = StateVector::new_zero(q).unwrap();
    for i in 0..q {
        s.apply_gate(&Gate::h(Qubit(i))).unwrap();
    }
    s
}

fn ftpo_correct() -> Outcome {
    let mut checks = 0usize;
    for q in 1..=8usize {
        let r = reg("s", 0, q);
        let base = uniform(q);
        let amp = (1u64 << q) as f64;
        let amp = 1.0 / amp.sqrt();
        for t in 0..1u64 << q {
            let th = Threshold::new(t, q).unwrap();
            let mut c = Circuit::new(q, "host");
            c.append(&build_ftpo(th, &r, &[]).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let mut s = base.clone();
            s.apply_circuit(&c).map_err(|e| e.to_string())?;
            for (idx, a) in s.amplitudes().iter().enumerate() {
                let want = if idx as u64 > t { -amp } else { amp };
                ensure((a.re - want).abs() < 1e-12 && a.im.abs() < 1e-12, || {
                    format!("q={q} T={t}: amplitude of {idx} is {a}")
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} sign checks, q <= 8"))
}

fn ftpo_resources() -> Outcome {
    for q in 1..=8usize {
        let r = reg("s", 0, q);
        for t in 0..1u64 << q {
            let th = Threshold::new(t, q).unwrap();
            let c = build_ftpo(th, &r, &[]).map_err(|e| e.to_string())?;
            let phase = c.stats().phase_gates;
            ensure(phase == th.zero_bits(), || {
                format!(
                    "q={q} T={t}: {phase} phase gates, {} zero bits",
                    th.zero_bits()
                )
            })?;
        }
        let worst = build_ftpo(Threshold::new(0, q).unwrap(), &r, &[])
            .unwrap()
            .stats()
            .phase_gates;
        ensure(worst == q, || {
            format!("q={q}: T=0 gives {worst} phase gates")
        })?;
    }
    Ok("phase gates = zero bits of T for all T, q <= 8; T=0 gives q".into())
}

fn qpa_correct() -> Outcome {
    let mut cases = 0;
    for q in 1..=6usize {
        let r = reg("s", 0, q);
        let anc = Qubit(q);
        for t in 0..1u64 << q {
            let th = Threshold::new(t, q).unwrap();
            let c = build_qpa(th, &r, anc).map_err(|e| e.to_string())?;
            ensure(c.num_qubits() == q + 1, || {
                format!("q={q}: {} wires", c.num_qubits())
            })?;
            ensure(c.count_blocks("FTPO") == 1, || {
                format!("q={q} T={t}: FTPO block count")
            })?;
            for s in 0..1usize << q {
                let out = basis_image(&c, s)
                    .ok_or_else(|| format!("q={q} T={t}: s={s} not classical"))?;
                let want = s | if s as u64 > t { anc.mask() } else { 0 };
                ensure(out == want, || format!("q={q} T={t}: s={s} -> {out}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{cases} cases, q <= 6, one ancilla, one oracle block"
    ))
}

fn neqr_round_trip_one(img: &GrayImage) -> Result<(), String> {
    let l = RegisterLayout::new(img.side_log2(), img.bit_depth());
    let mut host = Circuit::new(l.num_qubits(), "round-trip");
    let oracle = build_neqr_oracle(img, &l.x, &l.y, &l.i1).map_err(|e| e.to_string())?;
    host.append(&oracle).map_err(|e| e.to_string())?;
    let mut s = StateVector::new_zero(l.num_qubits()).unwrap();
    s.apply_circuit(&build_position_superposition(&l).unwrap())
        .unwrap();
    s.apply_circuit(&host).unwrap();
    for (idx, _) in s.enumerate_basis(1e-9) {
        let (x, y) = l.decode_position(idx);
        ensure(l.i1.read(idx) == u64::from(img.get(x, y)), || {
            format!("wrong encoding at ({x},{y})")
        })?;
    }
    let mut undo = Circuit::new(l.num_qubits(), "undo");
    undo.append(&build_neqr_inverse(img, &l.x, &l.y, &l.i1).unwrap())
        .unwrap();
    s.apply_circuit(&undo).unwrap();
    let mask = l.i1.mask();
    let residual = s.probability_where(|i| i & mask != 0);
    ensure(residual < 1e-12, || {
        format!("residual probability {residual:e}")
    })
}

fn neqr_round_trip() -> Outcome {
    for code in 0..256u16 {
        let px = (0..4).map(|k| (code >> (2 * k)) & 3).collect();
        neqr_round_trip_one(&GrayImage::new(1, 2, px).unwrap())?;
    }
    let mut r = rng(7);
    for _ in 0..20 {
        neqr_round_trip_one(&random_image(&mut r, 2, 2))?;
    }
    Ok("256 exhaustive 2x2 + 20 random 4x4 images, residual < 1e-12".into())
}

fn shift_state_shape() -> Outcome {
    // one descending pair along y: (0,0)=2 -> (0,1)=0; the rest ascends or is flat
    let img = GrayImage::from_rows(&[vec![2, 0], vec![2, 2]], 2).unwrap();
    let l = RegisterLayout::new(1, 2);
    let mut s = StateVector::new_zero(l.num_qubits()).unwrap();
    s.apply_circuit(&build_position_superposition(&l).unwrap())
        .unwrap();
    for c in [
        build_neighborhood_stage(&img, &l, Axis::Y),
        build_gradient_stage(&l, Axis::Y),
        build_reset_stage(&img, &l, Axis::Y),
        build_shift_stage(&img, &l, Axis::Y),
    ] {
        s.apply_circuit(&c.map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    }
    let branches = decode_branches(&s, &l, 1e-9);
    let split: Vec<_> = branches.iter().filter(|b| b.a2).collect();
    ensure(split.len() == 2, || {
        format!("{} ancilla-1 branches", split.len())
    })?;
    let half = 0.5 * FRAC_1_SQRT_2;
    let stay = split
        .iter()
        .find(|b| !b.sign_y)
        .ok_or("missing unshifted half")?;
    let moved = split
        .iter()
        .find(|b| b.sign_y)
        .ok_or("missing shifted half")?;
    ensure((stay.x, stay.y, stay.i1) == (0, 0, 2), || {
        format!("unshifted half {stay:?}")
    })?;
    ensure((moved.x, moved.y, moved.i1) == (0, 1, 0), || {
        format!("shifted half {moved:?}")
    })?;
    ensure(
        (stay.amplitude.re - half).abs() < 1e-9 && stay.amplitude.im.abs() < 1e-9,
        || format!("unshifted amplitude {}", stay.amplitude),
    )?;
    ensure(
        (moved.amplitude.re + half).abs() < 1e-9 && moved.amplitude.im.abs() < 1e-9,
        || format!("shifted amplitude {}", moved.amplitude),
    )?;
    ensure(stay.grad == 2 && moved.grad == 2, || {
        "gradient not carried".into()
    })?;
    for b in branches.iter().filter(|b| !b.a2) {
        ensure(!b.sign_y && (b.amplitude.re - 0.5).abs() < 1e-9, || {
            format!("untouched branch {b:?}")
        })?;
    }
    Ok("two branches +-1/sqrt(2) relative amplitude, I1 re-encoded at the shifted position".into())
}

fn compare(img: &GrayImage, t: u64) -> Result<String, String> {
    let th = Threshold::new(t, img.bit_depth()).unwrap();
    let got = run(img, &PipelineConfig::new(th).with_mode(Mode::PerDirection))
        .map_err(|e| e.to_string())?;
    let want = reference_edge_map(img, t).edge;
    ensure(got.edges == want, || {
        format!(
            "T={t} image {:?}: got {:?}, want {:?}",
            img.rows(),
            got.edges.rows(),
            want.rows()
        )
    })?;
    Ok(edge_map_to_pgm(&got.edges))
}

fn step_images() -> Vec<GrayImage> {
    let mut out = Vec::new();
    for n in [1usize, 2, 3] {
        let side = 1 << n;
        let flat = vec![vec![1u16; side]; side];
        let rows_step: Vec<Vec<u16>> = (0..side)
            .map(|r| vec![if r < side / 2 { 0 } else { 3 }; side])
            .collect();
        let cols_step: Vec<Vec<u16>> = (0..side)
            .map(|_| {
                (0..side)
                    .map(|c| if c < side / 2 { 3 } else { 0 })
                    .collect()
            })
            .collect();
        for rows in [flat, rows_step, cols_step] {
            out.push(GrayImage::from_rows(&rows, 2).unwrap());
        }
    }
    out
}

fn random_4x4_suite() -> Result<Vec<String>, String> {
    let mut r = rng(2024);
    let mut files = Vec::new();
    for _ in 0..25 {
        let img = random_image(&mut r, 2, 2);
        for t in 0..4 {
            files.push(compare(&img, t)?);
        }
    }
    Ok(files)
}

fn pipeline_matches_reference() -> Outcome {
    let started = Instant::now();
    let mut runs = 0;
    for img in step_images() {
        for t in 0..4 {
            compare(&img, t)?;
            runs += 1;
        }
    }
    runs += random_4x4_suite()?.len();
    let mut r = rng(88);
    for _ in 0..5 {
        let img = random_image(&mut r, 3, 2);
        for t in [1, 2] {
            compare(&img, t)?;
            runs += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(300), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{runs} runs identical to the classical rule"))
}

fn qubit_budget() -> Outcome {
    let mut constants = Vec::new();
    for (n, seed) in [(2usize, 1u64), (3, 2)] {
        let img = random_image(&mut rng(seed), n, 2);
        let out = run(&img, &PipelineConfig::new(Threshold::new(1, 2).unwrap()))
            .map_err(|e| e.to_string())?;
        constants.push(out.stats.qubit_count as i64 - (2 * n + 3 * 2) as i64);
    }
    ensure(constants[0] == constants[1], || {
        format!("c differs: {constants:?}")
    })?;
    Ok(format!(
        "qubits = 2n + 3q + {} at (2,2) and (3,2)",
        constants[0]
    ))
}

fn depth_ratio(depth: usize, q: usize) -> f64 {
    depth as f64 / (q as f64 * (q as f64).log2())
}

/// `r(q) = depth / (q log2 q)` must not grow by more than x1.5 per step.
fn scaling_ok(depths: &[(usize, usize)]) -> (bool, Vec<f64>) {
    let ratios: Vec<f64> = depths.iter().map(|&(q, d)| depth_ratio(d, q)).collect();
    (ratios.windows(2).all(|w| w[1] <= 1.5 * w[0]), ratios)
}

/// Marks each `s > T` with its own fully controlled Z.
fn naive_oracle(q: usize, t: u64) -> Circuit {
    let mut c = Circuit::new(q, "naive");
    for s in t + 1..1u64 << q {
        let ctrls: Vec<Control> = (1..q)
            .map(|i| {
                if (s >> i) & 1 == 1 {
                    Control::on(Qubit(i))
                } else {
                    Control::off(Qubit(i))
                }
            })
            .collect();
        if s & 1 == 1 {
            c.push(Gate::mcz(ctrls, Qubit(0))).unwrap();
        } else {
            c.push(Gate::x(Qubit(0))).unwrap();
            c.push(Gate::mcz(ctrls, Qubit(0))).unwrap();
            c.push(Gate::x(Qubit(0))).unwrap();
        }
    }
    c
}

fn ftpo_scaling() -> Outcome {
    let qs = [2usize, 4, 8, 16];
    let depths: Vec<(usize, usize)> = qs
        .iter()
        .map(|&q| {
            let c = build_ftpo(Threshold::new(0, q).unwrap(), &reg("s", 0, q), &[]).unwrap();
            (q, c.stats().decomposed_depth)
        })
        .collect();
    let (ok, ratios) = scaling_ok(&depths);
    ensure(ok, || format!("ratios {ratios:?}"))?;

    // the check must reject an exponential construction
    let naive: Vec<(usize, usize)> = [2usize, 4, 8]
        .iter()
        .map(|&q| (q, naive_oracle(q, 0).stats().decomposed_depth))
        .collect();
    let (naive_ok, naive_ratios) = scaling_ok(&naive);
    ensure(!naive_ok, || {
        format!("negative control passed: {naive_ratios:?}")
    })?;

    let fmt: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Ok(format!(
        "decomposed depth / (q log2 q) at q=2,4,8,16: [{}], c = {:.3}",
        fmt.join(", "),
        ratios.iter().cloned().fold(0.0, f64::max)
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for pass in 0..2 {
        let files = random_4x4_suite()?;
        let mut written = Vec::new();
        for (k, text) in files.iter().enumerate() {
            let path = dir.path().join(format!("run{pass}_{k:03}.pgm"));
            std::fs::write(&path, text).map_err(|e| e.to_string())?;
            written.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        runs.push(written);
    }
    ensure(runs[0] == runs[1], || {
        "edge map files differ between runs".into()
    })?;
    Ok(format!(
        "{} edge map files byte-identical across two runs",
        runs[0].len()
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        (
            "ripple-carry adder exhaustive equivalence",
            qrca_exhaustive,
            10,
        ),
        (
            "two's complement involution and negation",
            s2c_involution,
            5,
        ),
        ("absolute subtractor magnitude and sign", abs_subtractor, 5),
        ("threshold phase oracle correctness", ftpo_correct, 60),
        ("threshold phase oracle gate count", ftpo_resources, 60),
        ("partitioning ancilla and resources", qpa_correct, 30),
        ("NEQR oracle round trip", neqr_round_trip, 60),
        ("direction-aware shift state shape", shift_state_shape, 60),
        (
            "pipeline equals classical reference",
            pipeline_matches_reference,
            300,
        ),
        ("qubit budget constant", qubit_budget, 300),
        ("oracle depth scaling", ftpo_scaling, 60),
        ("determinism of edge map files", determinism, 300),
    ];
    let mut failed = 0;
    for (k, (name, f, limit)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let mut outcome = f();
        let secs = started.elapsed().as_secs_f64();
        if outcome.is_ok() && secs > *limit as f64 {
            outcome = Err(format!("exceeded {limit}s time limit"));
        }
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {why}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
