//! `qedge` command-line front end.
//!
//! Exit codes: 0 success, 2 reference mismatch, 64 bad flags, 65 qubit budget
//! exceeded, 66 unreadable input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arith::{
    build_abs_subtractor, build_ladder_shift, build_qrca, build_s2c, AdderLayout, RegisterRef,
    ShiftDirection,
};
use crate::error::Error;
use crate::image::{load_pgm, write_edge_map, EdgeMap, GrayImage};
use crate::pipeline::{run, Mode, PipelineConfig, ResetStrategy};
use crate::reference::reference_edge_map;
use crate::sim::{Circuit, Qubit};
use crate::threshold::{build_ftpo, build_qpa, Threshold};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_BUDGET: i32 = 65;
pub const EXIT_INPUT: i32 = 66;

#[derive(Parser, Debug)]
#[command(
    name = "qedge",
    version,
    about = "Quantum gradient edge detection on a statevector simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the edge detector on a PGM image.
    Detect(DetectArgs),
    /// Print a gate listing and statistics for one building block.
    Dump(DumpArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    PerDirection,
    Composite,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ResetArg {
    Unitary,
    Hybrid,
}

#[derive(clap::Args, Debug)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Decimal, `0b`-prefixed binary, or a q-character bit string (MSB first).
    #[arg(long)]
    pub threshold: String,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "per-direction")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "unitary")]
    pub reset: ResetArg,
    /// Requantize to this many bits by dropping low-order bits.
    #[arg(long)]
    pub bit_depth: Option<usize>,
    /// Also run the classical rule and compare.
    #[arg(long)]
    pub reference: bool,
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Test hook: flip one reference pixel before comparing.
    #[arg(long, hide = true)]
    pub corrupt_reference: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CircuitKind {
    Qrca,
    S2c,
    AbsSub,
    Ladder,
    Ftpo,
    Qpa,
}

#[derive(clap::Args, Debug)]
pub struct DumpArgs {
    #[arg(long, value_enum)]
    pub circuit: CircuitKind,
    /// Register width (operand width for arithmetic, q for ftpo/qpa).
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub threshold: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub q: usize,
    pub mode: String,
    pub reset: String,
    pub threshold: u64,
    pub qubit_count: usize,
    pub gate_total: usize,
    pub phase_gates: usize,
    pub multi_controlled_count: usize,
    pub max_control_arity: usize,
    pub depth: usize,
    pub decomposed_depth: usize,
    pub edge_pixel_count: usize,
    pub wall_time_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_match: Option<bool>,
}

impl RunReport {
    /// `key=value` lines followed by a `# json` line and one JSON object.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        };
        kv("n", self.n.to_string());
        kv("q", self.q.to_string());
        kv("mode", self.mode.clone());
        kv("reset", self.reset.clone());
        kv("threshold", self.threshold.to_string());
        kv("qubit_count", self.qubit_count.to_string());
        kv("gate_total", self.gate_total.to_string());
        kv("phase_gates", self.phase_gates.to_string());
        kv(
            "multi_controlled_count",
            self.multi_controlled_count.to_string(),
        );
        kv("max_control_arity", self.max_control_arity.to_string());
        kv("depth", self.depth.to_string());
        kv("decomposed_depth", self.decomposed_depth.to_string());
        kv("edge_pixel_count", self.edge_pixel_count.to_string());
        kv("wall_time_ms", self.wall_time_ms.to_string());
        if let Some(m) = self.oracle_match {
            kv("oracle_match", m.to_string());
        }
        s.push_str("# json\n");
        s.push_str(&serde_json::to_string(self).expect("report serializes"));
        s.push('\n');
        s
    }
}

fn exit_for(err: &Error) -> i32 {
    match err {
        Error::Budget { .. } | Error::Capacity { .. } => EXIT_BUDGET,
        Error::Io(_) | Error::Pgm(_) | Error::InvalidImage(_) => EXIT_INPUT,
        _ => EXIT_USAGE,
    }
}

fn load_input(path: &Path, bit_depth: Option<usize>) -> Result<GrayImage, (i32, String)> {
    let image = load_pgm(path).map_err(|e| (EXIT_INPUT, format!("{}: {e}", path.display())))?;
    match bit_depth {
        Some(q) if q == 0 || q > image.bit_depth() => Err((
            EXIT_USAGE,
            format!("--bit-depth {q} must be in 1..={}", image.bit_depth()),
        )),
        Some(q) => image
            .with_bit_depth(q)
            .map_err(|e| (EXIT_USAGE, e.to_string())),
        None => Ok(image),
    }
}

fn flip_first(map: &EdgeMap) -> EdgeMap {
    let mut m = map.clone();
    m.set(0, 0, !map.get(0, 0));
    m
}

pub fn cmd_detect(args: &DetectArgs, out: &mut dyn Write) -> Result<i32, (i32, String)> {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err((
            EXIT_USAGE,
            format!("--tol must be a positive number, got {}", args.tol),
        ));
    }
    let image = load_input(&args.input, args.bit_depth)?;
    let threshold = Threshold::parse(&args.threshold, Some(image.bit_depth()))
        .map_err(|e| (EXIT_USAGE, format!("--threshold: {e}")))?;
    let mut config = PipelineConfig::new(threshold)
        .with_mode(match args.mode {
            ModeArg::PerDirection => Mode::PerDirection,
            ModeArg::Composite => Mode::Composite,
        })
        .with_reset(match args.reset {
            ResetArg::Unitary => ResetStrategy::Unitary,
            ResetArg::Hybrid => ResetStrategy::Hybrid,
        });
    config.tol = args.tol;

    let started = Instant::now();
    let result = run(&image, &config).map_err(|e| (exit_for(&e), e.to_string()))?;
    let wall_time_ms = started.elapsed().as_millis();

    write_edge_map(&result.edges, &args.output)
        .map_err(|e| (EXIT_INPUT, format!("{}: {e}", args.output.display())))?;

    let oracle_match = args.reference.then(|| {
        let mut expected = reference_edge_map(&image, threshold.value()).edge;
        if args.corrupt_reference {
            expected = flip_first(&expected);
        }
        expected == result.edges
    });

    let g = result.stats.gates;
    let report = RunReport {
        n: image.side_log2(),
        q: image.bit_depth(),
        mode: config.mode.to_string(),
        reset: config.reset.to_string(),
        threshold: threshold.value(),
        qubit_count: result.stats.qubit_count,
        gate_total: g.total_gates,
        phase_gates: g.phase_gates,
        multi_controlled_count: g.multi_controlled_count,
        max_control_arity: g.max_control_arity,
        depth: g.depth,
        decomposed_depth: g.decomposed_depth,
        edge_pixel_count: result.edges.count(),
        wall_time_ms,
        oracle_match,
    };
    let text = report.render();
    match &args.stats {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| (EXIT_INPUT, format!("{}: {e}", path.display())))?,
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    if oracle_match == Some(false) {
        return Err((
            EXIT_MISMATCH,
            "edge map differs from classical reference".into(),
        ));
    }
    Ok(EXIT_OK)
}

fn contiguous(name: &str, start: usize, width: usize) -> RegisterRef {
    RegisterRef::contiguous(name, start, width)
}

/// Builds the requested block over a register file laid out from qubit 0.
pub fn build_dump_circuit(
    kind: CircuitKind,
    width: Option<usize>,
    threshold: Option<&str>,
) -> crate::Result<Circuit> {
    let needs_threshold = matches!(kind, CircuitKind::Ftpo | CircuitKind::Qpa);
    if needs_threshold {
        let text =
            threshold.ok_or_else(|| Error::InvalidThreshold("--threshold is required".into()))?;
        let t = Threshold::parse(text, width)?;
        let grad = contiguous("s", 0, t.width());
        return match kind {
            CircuitKind::Ftpo => build_ftpo(t, &grad, &[]),
            _ => build_qpa(t, &grad, Qubit(t.width())),
        };
    }
    let w = width.unwrap_or(3);
    if w == 0 {
        return Err(Error::EmptyRegister("--width 0".into()));
    }
    match kind {
        CircuitKind::Qrca => build_qrca(&AdderLayout {
            a: contiguous("a", 0, w),
            b: contiguous("b", w, w),
            carry_in: Qubit(2 * w),
            carry_out: Some(Qubit(2 * w + 1)),
        }),
        CircuitKind::S2c => build_s2c(&contiguous("y", 0, w)),
        CircuitKind::AbsSub => {
            build_abs_subtractor(&contiguous("a", 0, w), &contiguous("b", w, w), Qubit(2 * w))
        }
        CircuitKind::Ladder => build_ladder_shift(&contiguous("x", 0, w), ShiftDirection::Up, None),
        CircuitKind::Ftpo | CircuitKind::Qpa => unreachable!(),
    }
}

pub fn cmd_dump(args: &DumpArgs, out: &mut dyn Write) -> Result<i32, (i32, String)> {
    let circuit = build_dump_circuit(args.circuit, args.width, args.threshold.as_deref())
        .map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let stats = circuit.stats();
    let mut text = circuit.to_string();
    text.push_str(&format!(
        "gate_stats total={} phase={} multi_controlled={} max_arity={} depth={} decomposed_depth={}\n",
        stats.total_gates,
        stats.phase_gates,
        stats.multi_controlled_count,
        stats.max_control_arity,
        stats.depth,
        stats.decomposed_depth
    ));
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Diagnostics go to `err`.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Detect(a) => cmd_detect(a, out),
        Command::Dump(a) => cmd_dump(a, out),
    };
    match result {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(err, "qedge: {msg}");
            code
        }
    }
}
