use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qedge::arith::{self, AdderLayout, RegisterRef, ShiftDirection};
use qedge::image::{self, EdgeMap};
use qedge::pipeline::{self, Mode, PipelineConfig, ResetStrategy};
use qedge::sim::{self, GateStats, Qubit};
use qedge::threshold::{self, Threshold};

fn err(e: qedge::Error) -> PyErr {
    match e {
        qedge::Error::Io(io) => PyIOError::new_err(io.to_string()),
        qedge::Error::Capacity { .. } | qedge::Error::Budget { .. } => {
            PyMemoryError::new_err(e.to_string())
        }
        qedge::Error::Consistency(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_threshold(value: &Bound<'_, PyAny>, width: Option<usize>) -> PyResult<Threshold> {
    if let Ok(v) = value.extract::<u64>() {
        let width =
            width.ok_or_else(|| PyValueError::new_err("integer threshold needs a width"))?;
        return Threshold::new(v, width).map_err(err);
    }
    let text: String = value.extract()?;
    Threshold::parse(&text, width).map_err(err)
}

fn stats_dict<'py>(py: Python<'py>, s: &GateStats) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("total_gates", s.total_gates)?;
    d.set_item("phase_gates", s.phase_gates)?;
    d.set_item("multi_controlled_count", s.multi_controlled_count)?;
    d.set_item("max_control_arity", s.max_control_arity)?;
    d.set_item("depth", s.depth)?;
    d.set_item("decomposed_depth", s.decomposed_depth)?;
    Ok(d)
}

fn edge_rows(map: &EdgeMap) -> Vec<Vec<bool>> {
    map.rows()
}

#[pyclass(name = "GrayImage", module = "qedge_py", skip_from_py_object)]
#[derive(Clone)]
struct PyGrayImage {
    inner: image::GrayImage,
}

#[pymethods]
impl PyGrayImage {
    #[new]
    fn new(rows: Vec<Vec<u16>>, bit_depth: usize) -> PyResult<Self> {
        Ok(PyGrayImage {
            inner: image::GrayImage::from_rows(&rows, bit_depth).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_pgm(path: &str) -> PyResult<Self> {
        Ok(PyGrayImage {
            inner: image::load_pgm(path).map_err(err)?,
        })
    }

    fn to_pgm(&self, path: &str) -> PyResult<()> {
        image::write_pgm(&self.inner, path).map_err(err)
    }

    #[getter]
    fn side(&self) -> usize {
        self.inner.side()
    }

    #[getter]
    fn bit_depth(&self) -> usize {
        self.inner.bit_depth()
    }

    fn get(&self, x: usize, y: usize) -> PyResult<u16> {
        if x >= self.inner.side() || y >= self.inner.side() {
            return Err(PyValueError::new_err("position outside image"));
        }
        Ok(self.inner.get(x, y))
    }

    fn rows(&self) -> Vec<Vec<u16>> {
        self.inner.rows()
    }

    fn with_bit_depth(&self, bit_depth: usize) -> PyResult<Self> {
        Ok(PyGrayImage {
            inner: self.inner.with_bit_depth(bit_depth).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "GrayImage(side={}, bit_depth={})",
            self.inner.side(),
            self.inner.bit_depth()
        )
    }
}

#[pyclass(name = "Circuit", module = "qedge_py", skip_from_py_object)]
#[derive(Clone)]
struct PyCircuit {
    inner: sim::Circuit,
}

#[pymethods]
impl PyCircuit {
    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_owned()
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn gates(&self) -> Vec<String> {
        self.inner.gates().iter().map(|g| g.to_string()).collect()
    }

    fn count_blocks(&self, name: &str) -> usize {
        self.inner.count_blocks(name)
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        stats_dict(py, &self.inner.stats())
    }

    fn inverse(&self) -> Self {
        PyCircuit {
            inner: self.inner.inverse(),
        }
    }

    /// Classical action on a basis index: `(image, negated)`, or `None` for
    /// circuits containing Hadamards.
    fn permute_basis(&self, index: usize) -> Option<(usize, bool)> {
        self.inner.permute_basis(index)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(name={:?}, qubits={}, gates={})",
            self.inner.name(),
            self.inner.num_qubits(),
            self.inner.len()
        )
    }
}

#[pyclass(name = "StateVector", module = "qedge_py")]
struct PyStateVector {
    inner: sim::StateVector,
}

#[pymethods]
impl PyStateVector {
    #[new]
    #[pyo3(signature = (num_qubits, index = 0))]
    fn new(num_qubits: usize, index: usize) -> PyResult<Self> {
        Ok(PyStateVector {
            inner: sim::StateVector::new_basis(num_qubits, index).map_err(err)?,
        })
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    fn apply(&mut self, circuit: &PyCircuit) -> PyResult<()> {
        self.inner.apply_circuit(&circuit.inner).map_err(err)
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn enumerate_basis(&self, tol: f64) -> Vec<(usize, Complex64)> {
        self.inner.enumerate_basis(tol)
    }
}

fn reg(name: &str, start: usize, width: usize) -> RegisterRef {
    RegisterRef::contiguous(name, start, width)
}

/// Ripple-carry adder on `a = [0, w)`, `b = [w, 2w)`, carry-in `2w`,
/// optional carry-out `2w + 1`.
#[pyfunction]
#[pyo3(signature = (width, carry_out = true))]
fn qrca(width: usize, carry_out: bool) -> PyResult<PyCircuit> {
    let layout = AdderLayout {
        a: reg("a", 0, width),
        b: reg("b", width, width),
        carry_in: Qubit(2 * width),
        carry_out: carry_out.then_some(Qubit(2 * width + 1)),
    };
    Ok(PyCircuit {
        inner: arith::build_qrca(&layout).map_err(err)?,
    })
}

#[pyfunction]
fn s2c(width: usize) -> PyResult<PyCircuit> {
    Ok(PyCircuit {
        inner: arith::build_s2c(&reg("y", 0, width)).map_err(err)?,
    })
}

/// Absolute subtractor on `a = [0, w)`, `b = [w, 2w)` (MSB of `b` is the
/// sign), carry `2w`.
#[pyfunction]
fn abs_subtractor(width: usize) -> PyResult<PyCircuit> {
    Ok(PyCircuit {
        inner: arith::build_abs_subtractor(
            &reg("a", 0, width),
            &reg("b", width, width),
            Qubit(2 * width),
        )
        .map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (width, down = false))]
fn ladder(width: usize, down: bool) -> PyResult<PyCircuit> {
    let dir = if down {
        ShiftDirection::Down
    } else {
        ShiftDirection::Up
    };
    Ok(PyCircuit {
        inner: arith::build_ladder_shift(&reg("x", 0, width), dir, None).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (threshold, width = None))]
fn ftpo(threshold: &Bound<'_, PyAny>, width: Option<usize>) -> PyResult<PyCircuit> {
    let t = parse_threshold(threshold, width)?;
    Ok(PyCircuit {
        inner: threshold::build_ftpo(t, &reg("s", 0, t.width()), &[]).map_err(err)?,
    })
}

/// Partitioning circuit on `s = [0, q)` with the ancilla at `q`.
#[pyfunction]
#[pyo3(signature = (threshold, width = None))]
fn qpa(threshold: &Bound<'_, PyAny>, width: Option<usize>) -> PyResult<PyCircuit> {
    let t = parse_threshold(threshold, width)?;
    Ok(PyCircuit {
        inner: threshold::build_qpa(t, &reg("s", 0, t.width()), Qubit(t.width())).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (image, threshold, mode = "per-direction", reset = "unitary", tol = 1e-9))]
fn detect<'py>(
    py: Python<'py>,
    image: &PyGrayImage,
    threshold: &Bound<'py, PyAny>,
    mode: &str,
    reset: &str,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let t = parse_threshold(threshold, Some(image.inner.bit_depth()))?;
    let mut config = PipelineConfig::new(t)
        .with_mode(mode.parse::<Mode>().map_err(err)?)
        .with_reset(reset.parse::<ResetStrategy>().map_err(err)?);
    config.tol = tol;
    let img = image.inner.clone();
    let out = py
        .detach(move || pipeline::run(&img, &config))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("edges", edge_rows(&out.edges))?;
    d.set_item("edge_x", edge_rows(&out.edge_x))?;
    d.set_item("edge_y", edge_rows(&out.edge_y))?;
    d.set_item("edge_pixel_count", out.edges.count())?;
    d.set_item("qubit_count", out.stats.qubit_count)?;
    d.set_item("stats", stats_dict(py, &out.stats.gates)?)?;
    Ok(d)
}

#[pyfunction]
fn reference<'py>(
    py: Python<'py>,
    image: &PyGrayImage,
    threshold: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = qedge::reference::reference_edge_map(&image.inner, threshold);
    let d = PyDict::new(py);
    d.set_item("edges", edge_rows(&r.edge))?;
    d.set_item("edge_x", edge_rows(&r.edge_x))?;
    d.set_item("edge_y", edge_rows(&r.edge_y))?;
    d.set_item("grad_x", r.grad_x)?;
    d.set_item("grad_y", r.grad_y)?;
    Ok(d)
}

#[pyfunction]
fn required_qubits(side_log2: usize, bit_depth: usize) -> usize {
    image::RegisterLayout::required_qubits(side_log2, bit_depth)
}

#[pymodule]
fn qedge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrayImage>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyStateVector>()?;
    m.add_function(wrap_pyfunction!(qrca, m)?)?;
    m.add_function(wrap_pyfunction!(s2c, m)?)?;
    m.add_function(wrap_pyfunction!(abs_subtractor, m)?)?;
    m.add_function(wrap_pyfunction!(ladder, m)?)?;
    m.add_function(wrap_pyfunction!(ftpo, m)?)?;
    m.add_function(wrap_pyfunction!(qpa, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(reference, m)?)?;
    m.add_function(wrap_pyfunction!(required_qubits, m)?)?;
    m.add("MAX_QUBITS", sim::MAX_QUBITS)?;
    Ok(())
}
