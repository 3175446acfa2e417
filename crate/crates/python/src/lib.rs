//! Python bindings. Matrices cross the boundary as nested lists of complex
//! numbers; reports come back as the same JSON the `qds` binary emits.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use qds_core::cli::{self, CliError, LoadedGenerator};
use qds_core::entropy::EntropySpec;
use qds_core::linalg::CMatrix;
use qds_core::qubit::{self, QubitGeneratorParams};
use qds_core::states::{self, BistochasticMatrix, DensityOperator, EigenvalueVector};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cli_err(e: CliError) -> PyErr {
    match e {
        CliError::Config(m) => PyValueError::new_err(m),
        CliError::Numerical(m) => PyArithmeticError::new_err(m),
    }
}

fn load(config: &str) -> PyResult<LoadedGenerator> {
    cli::parse_config(config)
        .and_then(|c| c.load())
        .map_err(cli_err)
}

fn density(rows: Vec<Vec<Complex64>>) -> PyResult<DensityOperator> {
    let m = CMatrix::from_rows(&rows).map_err(value_err)?;
    DensityOperator::new(&m).map_err(value_err)
}

fn to_json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string_pretty(value).map_err(value_err)
}

/// Classification report (JSON) for a generator config given as JSON text.
#[pyfunction]
#[pyo3(signature = (config, samples = 200, seed = 0, rho_samples = 8))]
fn classify(config: &str, samples: usize, seed: u64, rho_samples: usize) -> PyResult<String> {
    let gen = load(config)?;
    to_json(&cli::classify(&gen, samples, seed, rho_samples).map_err(cli_err)?)
}

/// Entropy trace as CSV text; `state` is `mms`, `random:SEED` or `file:PATH`.
#[pyfunction]
#[pyo3(signature = (config, t_max, steps, entropies = "vn", state = "mms"))]
fn evolve(
    config: &str,
    t_max: f64,
    steps: usize,
    entropies: &str,
    state: &str,
) -> PyResult<String> {
    let gen = load(config)?;
    let specs = EntropySpec::parse_list(entropies).map_err(value_err)?;
    let rho = cli::initial_state(state, gen.dim()).map_err(cli_err)?;
    cli::evolve_csv(&gen, &rho, t_max, steps, &specs).map_err(cli_err)
}

/// Stationary state of the generator described by `config`.
#[pyfunction]
fn asymptotic_state(config: &str) -> PyResult<Vec<Vec<Complex64>>> {
    let gen = load(config)?;
    let rho =
        qubit::asymptotic_state(&gen.l).map_err(|e| PyArithmeticError::new_err(e.to_string()))?;
    Ok(rho.matrix().rows())
}

/// Entropy such as `vn`, `tsallis:2`, `renyi:0.5` or `np:inf` of a density matrix.
#[pyfunction]
fn entropy(rho: Vec<Vec<Complex64>>, spec: &str) -> PyResult<f64> {
    let rho = density(rho)?;
    let spec: EntropySpec = spec.parse().map_err(value_err)?;
    spec.evaluate(&rho).map_err(value_err)
}

/// Whether probability vector `x` majorizes `y`.
#[pyfunction]
fn majorizes(x: Vec<f64>, y: Vec<f64>) -> PyResult<bool> {
    let x = EigenvalueVector::new(&x).map_err(value_err)?;
    let y = EigenvalueVector::new(&y).map_err(value_err)?;
    states::majorizes(&x, &y).map_err(value_err)
}

/// Birkhoff decomposition as (weight, permutation) pairs, with
/// `perm[i]` the column of the 1 in row i.
#[pyfunction]
fn birkhoff(rows: Vec<Vec<f64>>) -> PyResult<Vec<(f64, Vec<usize>)>> {
    let b = BistochasticMatrix::from_rows(&rows).map_err(value_err)?;
    let dec =
        states::birkhoff_decompose(&b).map_err(|e| PyArithmeticError::new_err(e.to_string()))?;
    Ok(dec.terms.into_iter().map(|t| (t.weight, t.perm)).collect())
}

/// Cone report (JSON) for the unital qubit generator with parameters (h, K).
#[pyfunction]
fn qubit_cone(h: [f64; 3], k: [[f64; 3]; 3]) -> PyResult<String> {
    let params = QubitGeneratorParams::new(h, k).map_err(value_err)?;
    to_json(&cli::cone_report(&params))
}

#[pymodule]
fn qds_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_state, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(majorizes, m)?)?;
    m.add_function(wrap_pyfunction!(birkhoff, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_cone, m)?)?;
    Ok(())
}
