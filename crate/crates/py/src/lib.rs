//! Python bindings. Indices are 0-based here, unlike the command line.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use mutant::diagram::recognize_matrix_type;
use mutant::models::{verify_geometric_identities, ModelKind};
use mutant::verify::{run_suite, SuiteOptions};
use mutant::{Diagram, ExchangeMatrix, RootSystem};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Mutate an exchange matrix at each index of `at` in turn.
#[pyfunction]
fn mutate(rows: Vec<Vec<i64>>, at: Vec<usize>) -> PyResult<Vec<Vec<i64>>> {
    let b = ExchangeMatrix::new(rows).map_err(value_err)?;
    Ok(b.mutate_seq(&at).map_err(value_err)?.to_i64_rows())
}

/// Cartan-Killing type of the mutation class, or None when it is infinite.
#[pyfunction]
fn classify(rows: Vec<Vec<i64>>) -> PyResult<Option<String>> {
    let b = ExchangeMatrix::new(rows).map_err(value_err)?;
    if !b.is_skew_symmetrizable() {
        return Err(PyValueError::new_err("matrix is not skew-symmetrizable"));
    }
    Ok(recognize_matrix_type(&b).map(|t| t.to_string()))
}

/// Diagram of a matrix as JSON ({"n", "edges": [{"tail", "head", "w"}]}).
#[pyfunction]
fn diagram_json(rows: Vec<Vec<i64>>) -> PyResult<String> {
    let b = ExchangeMatrix::new(rows).map_err(value_err)?;
    Ok(Diagram::of_matrix(&b).map_err(value_err)?.to_json().to_string())
}

/// Almost positive roots in simple-root coordinates.
#[pyfunction]
fn almost_positive_roots(ty: &str) -> PyResult<Vec<Vec<i64>>> {
    Ok(RootSystem::from_type_str(ty).map_err(value_err)?.roots().to_vec())
}

/// Clusters as sorted lists of indices into `almost_positive_roots`.
#[pyfunction]
fn clusters(ty: &str) -> PyResult<Vec<Vec<usize>>> {
    Ok(RootSystem::from_type_str(ty).map_err(value_err)?.clusters().to_vec())
}

/// Run a named verification suite; returns (passed, report text).
#[pyfunction]
#[pyo3(signature = (suite, ty=None, seed=0))]
fn verify(suite: &str, ty: Option<&str>, seed: u64) -> PyResult<(bool, String)> {
    let opts = SuiteOptions { ty: ty.map(|t| t.parse()).transpose().map_err(value_err)?, seed, ..Default::default() };
    let rep = run_suite(suite, &opts).map_err(value_err)?;
    Ok((rep.passed(), rep.to_string()))
}

/// Polynomial identities of the polygon model of the given family and rank,
/// as a JSON report.
#[pyfunction]
fn geometric_identities(kind: &str, n: usize) -> PyResult<String> {
    let k = ModelKind::from_letter(kind.chars().next().unwrap_or(' ')).ok_or_else(|| PyValueError::new_err(format!("no polygon model for {kind:?}")))?;
    Ok(verify_geometric_identities(k, n).map_err(value_err)?.to_json().to_string())
}

#[pymodule]
#[pyo3(name = "mutant")]
fn mutant_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(mutate, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(diagram_json, m)?)?;
    m.add_function(wrap_pyfunction!(almost_positive_roots, m)?)?;
    m.add_function(wrap_pyfunction!(clusters, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_identities, m)?)?;
    Ok(())
}
