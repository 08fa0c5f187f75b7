//! Python bindings for the census engine.

use census_core::analysis::{discrepancy_stats, fit_log_linear};
use census_core::chc::{ch_dist, displacement_on_horosphere, CHPoint, HeisTranslation, ParabolicMap};
use census_core::displacement::{self as disp, oracle, ConjClassInvariants};
use census_core::groups::{cyclic_data, free_conj_count_bfs, free_conj_count_closed, HeisenbergElt, HeisenbergSpec, Word};
use census_core::job::{emit, parse_job, run_job, Format, JobError};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn engine(e: census_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn job_err(e: JobError) -> PyErr {
    match e {
        JobError::Parse { line: Some(l), message } => PyValueError::new_err(format!("line {l}: {message}")),
        JobError::Parse { line: None, message } => PyValueError::new_err(message),
        other => PyRuntimeError::new_err(format!("{other} (exit code {})", other.exit_code())),
    }
}

/// Invariants of a conjugacy class of planar isometries.
#[pyclass(name = "ClassInvariants", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyInvariants(ConjClassInvariants);

#[pymethods]
impl PyInvariants {
    #[staticmethod]
    #[pyo3(signature = (length, angle = 0.0))]
    fn loxodromic(length: f64, angle: f64) -> PyResult<Self> {
        ConjClassInvariants::loxodromic(length, angle).map(Self).map_err(engine)
    }

    #[staticmethod]
    fn parabolic(length: f64) -> PyResult<Self> {
        ConjClassInvariants::parabolic(length).map(Self).map_err(engine)
    }

    #[staticmethod]
    fn elliptic(angle: f64) -> PyResult<Self> {
        ConjClassInvariants::elliptic(angle).map(Self).map_err(engine)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind.name()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.0.length
    }

    #[getter]
    fn angle(&self) -> f64 {
        self.0.angle
    }

    fn min_displacement(&self) -> f64 {
        self.0.min_displacement()
    }

    fn displacement(&self, s: f64) -> PyResult<f64> {
        disp::displacement(&self.0, s).map_err(engine)
    }

    fn psi(&self, t: f64) -> PyResult<f64> {
        disp::psi_exact(&self.0, t).map_err(engine)
    }

    fn psi_asymptotic(&self, t: f64) -> PyResult<f64> {
        disp::psi_asymptotic(&self.0, t).map_err(engine)
    }

    fn __repr__(&self) -> String {
        format!("ClassInvariants({}, length={}, angle={})", self.0.kind.name(), self.0.length, self.0.angle)
    }
}

#[pyfunction]
#[pyo3(signature = (s, length, angle = 0.0))]
fn disp_loxo(s: f64, length: f64, angle: f64) -> PyResult<f64> {
    disp::disp_loxo(s, Complex64::new(length, angle)).map_err(engine)
}

#[pyfunction]
fn disp_loxo_bounds(s: f64, length: f64) -> PyResult<(f64, f64)> {
    disp::disp_loxo_bounds(s, length).map_err(engine)
}

#[pyfunction]
fn disp_para(s: f64, length: f64) -> PyResult<f64> {
    disp::disp_para(s, length).map_err(engine)
}

#[pyfunction]
fn disp_ell(s: f64, angle: f64) -> PyResult<f64> {
    disp::disp_ell(s, angle).map_err(engine)
}

/// Largest relative error and bound violations of the laws against matrix oracles.
#[pyfunction]
#[pyo3(signature = (samples = 10_000, seed = 0))]
fn verify_laws(py: Python<'_>, samples: usize, seed: u64) -> PyResult<(f64, usize)> {
    let r = py.detach(|| oracle::verify_laws(samples, samples, seed)).map_err(engine)?;
    Ok((r.max_rel_error(), r.violations()))
}

/// Runs a TOML job and returns the rendered report.
#[pyfunction]
#[pyo3(signature = (toml, format = "json"))]
fn run(py: Python<'_>, toml: &str, format: &str) -> PyResult<String> {
    let format = Format::parse(format).ok_or_else(|| PyValueError::new_err(format!("unknown format {format:?}")))?;
    let spec = parse_job(toml).map_err(job_err)?;
    py.detach(|| {
        let report = run_job(&spec)?;
        emit(&report, format).map(|e| e.primary)
    })
    .map_err(job_err)
}

/// `(bfs, closed_form)` conjugacy counts in the free group of rank `k` for `n = 0..=n_max`.
#[pyfunction]
fn free_counts(k: usize, word: &str, n_max: usize) -> PyResult<(Vec<u64>, Vec<u64>)> {
    let class = cyclic_data(&Word::parse(word).map_err(engine)?).map_err(engine)?;
    let mut bfs = Vec::with_capacity(n_max + 1);
    let mut closed = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        bfs.push(free_conj_count_bfs(k, &class, n).map_err(engine)?);
        closed.push(free_conj_count_closed(k, &class, n).map_err(engine)?);
    }
    Ok((bfs, closed))
}

/// Conjugacy counts of `(a, z)` in the standard Heisenberg group of the given rank.
#[pyfunction]
#[pyo3(signature = (rank, a, n_max, z = 0))]
fn heisenberg_counts(rank: usize, a: Vec<i64>, n_max: usize, z: i64) -> PyResult<Vec<u64>> {
    let h = HeisenbergSpec::standard(rank).map_err(engine)?;
    h.conj_count_series(&HeisenbergElt::new(a, z), n_max).map_err(engine)
}

/// `(slope, intercept, residual)` of a least-squares fit of `log y` on `x` inside `window`.
#[pyfunction]
fn fit_growth(xs: Vec<f64>, ys: Vec<u64>, window: (f64, f64)) -> PyResult<(f64, f64, f64)> {
    let f = fit_log_linear(&xs, &ys, window).map_err(engine)?;
    Ok((f.slope, f.intercept, f.residual))
}

/// `(tv, sup_cdf, chi2)` of a histogram against the uniform distribution.
#[pyfunction]
fn discrepancy(hist: Vec<u64>) -> PyResult<(f64, f64, f64)> {
    let d = discrepancy_stats(&hist).map_err(engine)?;
    Ok((d.tv, d.sup_cdf, d.chi2))
}

/// Distance between two points of complex hyperbolic space in homogeneous coordinates.
#[pyfunction]
fn ch_distance(x: Vec<Complex64>, y: Vec<Complex64>) -> PyResult<f64> {
    let x = CHPoint::from_coords(x).map_err(engine)?;
    let y = CHPoint::from_coords(y).map_err(engine)?;
    ch_dist(&x, &y).map_err(engine)
}

/// Displacements of the Heisenberg translation `(z, v)` at horospherical points
/// `[w0 : w : 1]` of height `s`, one per entry of `ws`.
#[pyfunction]
fn heisenberg_displacements(z: Vec<Complex64>, v: f64, s: f64, ws: Vec<Vec<Complex64>>) -> PyResult<Vec<f64>> {
    let map: ParabolicMap = HeisTranslation::with_height(z, v).as_parabolic();
    let sample = ws
        .into_iter()
        .map(|w| CHPoint::on_horosphere(s, w, 0.0))
        .collect::<census_core::Result<Vec<_>>>()
        .map_err(engine)?;
    Ok(displacement_on_horosphere(&map, s, &sample).map_err(engine)?.values)
}

#[pymodule]
fn census(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInvariants>()?;
    m.add_function(wrap_pyfunction!(disp_loxo, m)?)?;
    m.add_function(wrap_pyfunction!(disp_loxo_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(disp_para, m)?)?;
    m.add_function(wrap_pyfunction!(disp_ell, m)?)?;
    m.add_function(wrap_pyfunction!(verify_laws, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(free_counts, m)?)?;
    m.add_function(wrap_pyfunction!(heisenberg_counts, m)?)?;
    m.add_function(wrap_pyfunction!(fit_growth, m)?)?;
    m.add_function(wrap_pyfunction!(discrepancy, m)?)?;
    m.add_function(wrap_pyfunction!(ch_distance, m)?)?;
    m.add_function(wrap_pyfunction!(heisenberg_displacements, m)?)?;
    Ok(())
}
