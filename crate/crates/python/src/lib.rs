//! Python bindings. Structured results cross the boundary as JSON and come
//! back as plain dicts and lists.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use quasift::circuits::experiment;
use quasift::harness::{self, RunConfig, RunMode, SweepOptions};
use quasift::interferometry::{self, AmplitudeFamily};
use quasift::rng::rng_from_seed;
use quasift::trajectories::{self, ProjectorOrdering, QuasiDistribution, RecordTable};
use quasift::tripartite::{self, EvolvedState, TripartiteSetup};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_mode(mode: &str) -> PyResult<RunMode> {
    match mode {
        "exact" => Ok(RunMode::Exact),
        "sampled" | "sample" => Ok(RunMode::Sampled),
        "noisy" => Ok(RunMode::Noisy),
        _ => Err(err(format!("unknown mode {mode:?}"))),
    }
}

fn parse_ordering(name: &str) -> PyResult<ProjectorOrdering> {
    ProjectorOrdering::ALL
        .into_iter()
        .find(|o| format!("{o:?}").eq_ignore_ascii_case(&name.replace('_', "")))
        .ok_or_else(|| err(format!("unknown ordering {name:?}")))
}

fn parse_family(name: &str) -> PyResult<AmplitudeFamily> {
    match name {
        "a" | "bell_overlap" => Ok(AmplitudeFamily::BellOverlap),
        "b" | "interaction" => Ok(AmplitudeFamily::Interaction),
        "c" | "return" => Ok(AmplitudeFamily::Return),
        _ => Err(err(format!("unknown amplitude family {name:?}"))),
    }
}

fn load_setup(
    path: Option<PathBuf>,
    seed: Option<u64>,
    dims: (usize, usize, usize),
) -> PyResult<TripartiteSetup> {
    match (path, seed) {
        (Some(p), None) => TripartiteSetup::load(&p).map_err(err),
        (None, Some(s)) => tripartite::random_setup(dims, &mut rng_from_seed(s)).map_err(err),
        (None, None) => tripartite::reference_setup(
            tripartite::REFERENCE_THETA1,
            tripartite::REFERENCE_THETA2,
            1.0,
        )
        .map_err(err),
        (Some(_), Some(_)) => Err(err("give either a setup path or a seed, not both")),
    }
}

/// `{(r, s, l, n, r', s', l', n'): value}` with the eight engine labels.
fn distribution<'py>(py: Python<'py>, q: &QuasiDistribution) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for (z, w) in q.iter() {
        let [a, b, c, d, e, f, g, h] = z.labels();
        out.set_item((a, b, c, d, e, f, g, h), w)?;
    }
    Ok(out)
}

fn evolved(
    path: Option<PathBuf>,
    seed: Option<u64>,
    dims: (usize, usize, usize),
) -> PyResult<EvolvedState> {
    tripartite::evolve(&load_setup(path, seed, dims)?).map_err(err)
}

/// `[p_Phi+, p_Phi-, p_Psi+, p_Psi-]` of the Bell-diagonal preparation.
#[pyfunction]
fn bell_probabilities(theta1: f64, theta2: f64) -> [f64; 4] {
    experiment::bell_probabilities(theta1, theta2)
}

/// `I(S;R)` lost between the initial and final state.
#[pyfunction]
#[pyo3(signature = (path=None, seed=None, dims=(2, 2, 2)))]
fn delta_mutual_information(
    path: Option<PathBuf>,
    seed: Option<u64>,
    dims: (usize, usize, usize),
) -> PyResult<f64> {
    tripartite::delta_mutual_information(&evolved(path, seed, dims)?).map_err(err)
}

/// Forward and retrodicted quasiprobabilities keyed by trajectory labels.
/// Without a path or seed the reference setup is used.
#[pyfunction]
#[pyo3(signature = (path=None, seed=None, dims=(2, 2, 2), ordering="canonical"))]
fn quasiprobability<'py>(
    py: Python<'py>,
    path: Option<PathBuf>,
    seed: Option<u64>,
    dims: (usize, usize, usize),
    ordering: &str,
) -> PyResult<(Bound<'py, PyDict>, Bound<'py, PyDict>)> {
    let ev = evolved(path, seed, dims)?;
    let ordering = parse_ordering(ordering)?;
    let q = trajectories::quasiprobability(&ev, ordering).map_err(err)?;
    let qt = trajectories::retrodiction_quasiprobability(&ev, ordering).map_err(err)?;
    Ok((distribution(py, &q)?, distribution(py, &qt)?))
}

/// `<e^{-Delta iota}>_Q` on a setup.
#[pyfunction]
#[pyo3(signature = (path=None, seed=None, dims=(2, 2, 2)))]
fn integral_ft(
    path: Option<PathBuf>,
    seed: Option<u64>,
    dims: (usize, usize, usize),
) -> PyResult<f64> {
    let ev = evolved(path, seed, dims)?;
    let q = trajectories::quasiprobability(&ev, ProjectorOrdering::Canonical).map_err(err)?;
    trajectories::integral_ft(&q, &RecordTable::new(&ev)).map_err(err)
}

/// `tan(t/2) P1 - cot(t/2) P0 + cot t`.
#[pyfunction]
fn invert_amplitude(p0: f64, p1: f64, theta: f64) -> PyResult<f64> {
    interferometry::invert_amplitude(p0, p1, theta).map_err(err)
}

/// `[(labels, re, im)]` of one amplitude family, `"a"`, `"b"` or `"c"`.
#[pyfunction]
fn exact_amplitudes(family: &str) -> PyResult<Vec<(Vec<usize>, f64, f64)>> {
    let table = interferometry::exact_table(parse_family(family)?).map_err(err)?;
    Ok(table
        .entries
        .iter()
        .map(|e| (e.labels.clone(), e.value().re, e.value().im))
        .collect())
}

/// Runs the reference experiment and returns its summary. Writes the report
/// files when `out` is given.
#[pyfunction]
#[pyo3(signature = (mode="exact", shots=None, repetitions=None, seed=None, beta=None, out=None))]
fn run<'py>(
    py: Python<'py>,
    mode: &str,
    shots: Option<u64>,
    repetitions: Option<usize>,
    seed: Option<u64>,
    beta: Option<f64>,
    out: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let defaults = RunConfig::default();
    let cfg = RunConfig {
        mode: parse_mode(mode)?,
        shots: shots.unwrap_or(defaults.shots),
        repetitions: repetitions.unwrap_or(defaults.repetitions),
        seed: seed.unwrap_or(defaults.seed),
        beta: beta.unwrap_or(defaults.beta),
        out,
        ..defaults
    };
    let report = py.detach(|| harness::run(&cfg)).map_err(err)?;
    if let Some(dir) = &cfg.out {
        report.write(dir).map_err(err)?;
    }
    to_py(py, &report.summary)
}

/// Checks every trajectory identity on `n` random setups.
#[pyfunction]
#[pyo3(signature = (n=500, seed=1, dims=(2, 2, 2)))]
fn sweep<'py>(
    py: Python<'py>,
    n: usize,
    seed: u64,
    dims: (usize, usize, usize),
) -> PyResult<Bound<'py, PyAny>> {
    let options = SweepOptions {
        dims,
        ..SweepOptions::default()
    };
    let summary = py
        .detach(|| harness::sweep(n, seed, &options))
        .map_err(err)?;
    to_py(py, &summary)
}

#[pymodule]
#[pyo3(name = "quasift")]
fn quasift_python(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(bell_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(delta_mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(quasiprobability, m)?)?;
    m.add_function(wrap_pyfunction!(integral_ft, m)?)?;
    m.add_function(wrap_pyfunction!(invert_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(exact_amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add("REFERENCE_THETA1", tripartite::REFERENCE_THETA1)?;
    m.add("REFERENCE_THETA2", tripartite::REFERENCE_THETA2)?;
    Ok(())
}
