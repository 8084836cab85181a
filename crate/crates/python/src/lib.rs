//! Python module `lozenge`: region builders, brute-force counts, closed
//! forms and the verification sweep.

use lozenge_core::formula;
use lozenge_core::harness::{self, Check, SweepSpec};
use lozenge_core::lattice::{self, QHParams, TriRef};
use lozenge_core::matching::{self, Count};
use lozenge_core::render;
use num_bigint::{BigInt, BigUint};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A lozenge as its two cells.
type PyLozenge = ((i32, i32), (i32, i32));

fn int(c: Count) -> BigUint {
    c.0
}

/// A finite set of unit triangles, addressed by `(row, col)`; a cell is
/// up-pointing when `row + col` is even.
#[pyclass(name = "Region", frozen)]
struct PyRegion {
    inner: lattice::Region,
}

#[pymethods]
impl PyRegion {
    #[new]
    #[pyo3(signature = (cells, label = "region"))]
    fn new(cells: Vec<(i32, i32)>, label: &str) -> Self {
        PyRegion {
            inner: lattice::Region::new(label, cells.into_iter().map(|(r, c)| TriRef::new(r, c))),
        }
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        lattice::Region::from_text(text)
            .map(|inner| PyRegion { inner })
            .map_err(value_err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    #[getter]
    fn cells(&self) -> Vec<(i32, i32)> {
        self.inner.cells().iter().map(|t| (t.row, t.col)).collect()
    }

    #[getter]
    fn up_count(&self) -> usize {
        self.inner.up_count()
    }

    #[getter]
    fn down_count(&self) -> usize {
        self.inner.down_count()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, cell: (i32, i32)) -> bool {
        self.inner.contains(TriRef::new(cell.0, cell.1))
    }

    fn __repr__(&self) -> String {
        format!(
            "Region({:?}, {} cells)",
            self.inner.label(),
            self.inner.len()
        )
    }

    fn without(&self, cells: Vec<(i32, i32)>) -> Self {
        let cells: Vec<TriRef> = cells.into_iter().map(|(r, c)| TriRef::new(r, c)).collect();
        PyRegion {
            inner: self.inner.without(&cells),
        }
    }

    /// Returns the reduced region and the number of forced lozenges placed.
    fn remove_forced(&self) -> (Self, usize) {
        let (inner, placed) = lattice::remove_forced(&self.inner);
        (PyRegion { inner }, placed)
    }

    fn congruent(&self, other: &PyRegion) -> bool {
        self.inner.congruent(&other.inner)
    }

    fn count_tilings(&self, py: Python<'_>) -> BigUint {
        int(py.detach(|| matching::count_tilings(&self.inner)))
    }

    /// Up to `limit` tilings, each a list of `((r, c), (r, c))` lozenges.
    fn tilings(&self, limit: usize) -> Vec<Vec<PyLozenge>> {
        matching::enumerate_tilings(&self.inner, limit)
            .into_iter()
            .map(|t| {
                t.into_iter()
                    .map(|(p, q)| ((p.row, p.col), (q.row, q.col)))
                    .collect()
            })
            .collect()
    }

    #[pyo3(signature = (tiling = None))]
    fn to_svg(&self, tiling: Option<usize>) -> String {
        render::to_svg(&self.inner, tiling)
    }

    fn to_ascii(&self) -> String {
        render::to_ascii(&self.inner)
    }
}

fn params(a: u32, b: u32, c: u32, dents: Vec<u32>) -> PyResult<QHParams> {
    QHParams::new(a, b, c, dents).map_err(value_err)
}

#[pyfunction]
fn hexagon(a: u32, b: u32, c: u32) -> PyRegion {
    PyRegion {
        inner: lattice::build_hexagon(a, b, c),
    }
}

#[pyfunction]
fn staircase(a: u32, b: u32, c: u32) -> PyResult<PyRegion> {
    lattice::build_staircase_trimmed(a, b, c)
        .map(|inner| PyRegion { inner })
        .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (a, b, c, dents = Vec::new()))]
fn quartered(a: u32, b: u32, c: u32, dents: Vec<u32>) -> PyResult<PyRegion> {
    let p = params(a, b, c, dents)?;
    lattice::build_quartered(&p)
        .map(|inner| PyRegion { inner })
        .map_err(value_err)
}

/// Number of dents a quartered hexagon with sides `b`, `c` carries.
#[pyfunction]
fn dent_count(b: u32, c: u32) -> PyResult<u32> {
    lattice::dent_count(b, c)
        .ok_or_else(|| value_err(format!("b = {b} < c - 1 = {}", c as i64 - 1)))
}

#[pyfunction]
fn count_tilings(py: Python<'_>, region: &PyRegion) -> BigUint {
    region.count_tilings(py)
}

#[pyfunction]
fn macmahon(a: u32, b: u32, c: u32) -> PyResult<BigUint> {
    formula::macmahon_count(a, b, c).map(int).map_err(value_err)
}

#[pyfunction]
fn proctor(a: u32, b: u32, c: u32) -> PyResult<BigUint> {
    formula::proctor_count(a, b, c).map(int).map_err(value_err)
}

/// Closed form for `R(a,b,c; dents)`, either parity.
#[pyfunction]
#[pyo3(signature = (a, b, c, dents = Vec::new()))]
fn formula_quartered(a: u32, b: u32, c: u32, dents: Vec<u32>) -> PyResult<BigUint> {
    formula::formula_quartered(&params(a, b, c, dents)?)
        .map(int)
        .map_err(value_err)
}

/// Odd-case closed form as an exact `(numerator, denominator)` pair.
#[pyfunction]
#[pyo3(signature = (a, b, c, dents = Vec::new()))]
fn formula_ratio_form(a: u32, b: u32, c: u32, dents: Vec<u32>) -> PyResult<(BigInt, BigInt)> {
    let r = formula::formula_ratio_form(&params(a, b, c, dents)?).map_err(value_err)?;
    Ok((r.numer().clone(), r.denom().clone()))
}

#[pyfunction]
fn identity_check(s1: i64, d: i64, c: i64) -> PyResult<bool> {
    formula::identity_check(s1, d, c).map_err(value_err)
}

#[pyfunction]
fn ratio_lemma_check(set: Vec<i64>, d: i64) -> PyResult<bool> {
    let (Some(&first), Some(&last)) = (set.first(), set.last()) else {
        return Err(value_err("empty set"));
    };
    formula::ratio_lemma_check(&set, d, first, last).map_err(value_err)
}

/// `(holds, counts)` for the condensation recurrence, counts in the order
/// `L1 .. L6` of `L1 L2 = L3 L4 + L5 L6`.
#[pyfunction]
fn recurrence_check(a: u32, b: u32, c: u32, dents: Vec<u32>) -> PyResult<(bool, Vec<BigUint>)> {
    let out = harness::recurrence_check(a, b, c, &dents).map_err(value_err)?;
    Ok((out.holds, out.counts.into_iter().map(int).collect()))
}

/// Graph-level condensation on the instance built for `R(a,b,c; dents)`.
#[pyfunction]
fn kuo_check(a: u32, b: u32, c: u32, dents: Vec<u32>) -> PyResult<(bool, Vec<BigUint>)> {
    let inst = harness::kuo_instance(&params(a, b, c, dents)?).map_err(value_err)?;
    let out = matching::kuo_condensation_check(&inst.graph, inst.x, inst.y, inst.z, inst.t)
        .map_err(value_err)?;
    Ok((out.holds, out.counts.into_iter().map(int).collect()))
}

/// Runs the sweep and returns `{"passed": bool, "checks": {...}, "failures": [...]}`.
#[pyfunction]
#[pyo3(signature = (preset = "desk", checks = None, seed = None))]
fn run_sweep<'py>(
    py: Python<'py>,
    preset: &str,
    checks: Option<Vec<String>>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut spec = match preset {
        "desk" => SweepSpec::desk(),
        "empty" => SweepSpec::empty(),
        other => return Err(value_err(format!("unknown preset {other:?}"))),
    };
    if let Some(names) = checks {
        spec.checks = names
            .iter()
            .map(|n| n.parse::<Check>())
            .collect::<Result<_, _>>()
            .map_err(value_err)?;
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
    let report = py.detach(|| harness::run_sweep(&spec)).map_err(value_err)?;
    let out = PyDict::new(py);
    out.set_item("passed", report.all_passed())?;
    out.set_item("seed", report.seed)?;
    let tallies = PyDict::new(py);
    for t in report.summary() {
        tallies.set_item(&t.check, (t.total, t.passed, t.failed))?;
    }
    out.set_item("checks", tallies)?;
    let failures: Vec<(String, String, String, String)> = report
        .failures()
        .map(|r| {
            (
                r.check.clone(),
                r.params.clone(),
                r.expected.clone(),
                r.actual.clone(),
            )
        })
        .collect();
    out.set_item("failures", failures)?;
    Ok(out)
}

/// `[(a, b, c, count, matched_label_or_None, cell_identical)]`.
#[pyfunction]
fn correspondence_probe(
    max_a: u32,
    max_b: u32,
    max_c: u32,
) -> Vec<(u32, u32, u32, BigUint, Option<String>, bool)> {
    harness::correspondence_probe(max_a, max_b, max_c)
        .entries
        .into_iter()
        .map(|e| {
            (
                e.a,
                e.b,
                e.c,
                e.count.0,
                e.matched.map(|q| q.label()),
                e.cell_identical,
            )
        })
        .collect()
}

#[pymodule]
fn lozenge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRegion>()?;
    m.add_function(wrap_pyfunction!(hexagon, m)?)?;
    m.add_function(wrap_pyfunction!(staircase, m)?)?;
    m.add_function(wrap_pyfunction!(quartered, m)?)?;
    m.add_function(wrap_pyfunction!(dent_count, m)?)?;
    m.add_function(wrap_pyfunction!(count_tilings, m)?)?;
    m.add_function(wrap_pyfunction!(macmahon, m)?)?;
    m.add_function(wrap_pyfunction!(proctor, m)?)?;
    m.add_function(wrap_pyfunction!(formula_quartered, m)?)?;
    m.add_function(wrap_pyfunction!(formula_ratio_form, m)?)?;
    m.add_function(wrap_pyfunction!(identity_check, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_lemma_check, m)?)?;
    m.add_function(wrap_pyfunction!(recurrence_check, m)?)?;
    m.add_function(wrap_pyfunction!(kuo_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(correspondence_probe, m)?)?;
    Ok(())
}
