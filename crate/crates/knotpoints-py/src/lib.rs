//! Python bindings. Functions and sets cross the boundary as the same JSON
//! documents the CLI reads and writes; rationals travel as decimal or `p/q`
//! strings so nothing is rounded on the way.

use knotpoints::intervalsets::{hausdorff as hausdorff_exact, IntervalSet, IntervalSetJson};
use knotpoints::nsets::{n_set, window as window_exact, NSetRequest, Variant};
use knotpoints::rational::{fmt_q, parse_q, to_f64};
use knotpoints::realfn::{random_function as random_pwl, Function, FunctionJson};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_function(s: &str) -> PyResult<Function> {
    let j: FunctionJson = serde_json::from_str(s).map_err(value_err)?;
    Function::from_json(&j).map_err(value_err)
}

fn parse_set(s: &str) -> PyResult<IntervalSet> {
    let j: IntervalSetJson = serde_json::from_str(s).map_err(value_err)?;
    IntervalSet::from_json(&j).map_err(value_err)
}

fn pairs(s: &IntervalSet) -> Vec<(String, String)> {
    s.intervals().iter().map(|(l, r)| (fmt_q(l), fmt_q(r))).collect()
}

/// `N`-set of a function given as JSON. Returns `(inner, outer)` interval
/// lists; they coincide for piecewise-linear input.
#[pyfunction]
#[pyo3(signature = (function, a, variant = "full", tol = 1e-6))]
#[allow(clippy::type_complexity)]
fn nset(function: &str, a: &str, variant: &str, tol: f64) -> PyResult<(Vec<(String, String)>, Vec<(String, String)>)> {
    let variant = Variant::parse(variant).ok_or_else(|| value_err(format!("unknown variant '{variant}'")))?;
    let req = NSetRequest { f: parse_function(function)?, a: parse_q(a).map_err(value_err)?, variant };
    let e = n_set(&req, tol).map_err(value_err)?;
    Ok((pairs(&e.inner), pairs(&e.outer)))
}

/// Exact Hausdorff distance between two interval-set documents, as a string.
#[pyfunction]
fn hausdorff(k: &str, l: &str) -> PyResult<String> {
    Ok(fmt_q(&hausdorff_exact(&parse_set(k)?, &parse_set(l)?)))
}

/// Window length `2^-a`.
#[pyfunction]
fn window(a: &str) -> PyResult<f64> {
    Ok(to_f64(&window_exact(&parse_q(a).map_err(value_err)?).map_err(value_err)?))
}

/// Seeded midpoint-displacement function as a JSON document.
#[pyfunction]
#[pyo3(signature = (seed, depth, decay = 0.6))]
fn random_function(seed: u64, depth: u32, decay: f64) -> PyResult<String> {
    if depth > 20 {
        return Err(value_err("depth above 20 is not supported"));
    }
    serde_json::to_string(&Function::Pwl(random_pwl(seed, depth, decay)).to_json()).map_err(value_err)
}

/// Runs a CLI command in-process. Returns `(exit_code, report_json, stdout)`;
/// argument errors raise `ValueError`.
#[pyfunction]
fn run(args: Vec<String>) -> PyResult<(i32, String, String)> {
    let argv = std::iter::once("knotpoints".to_string()).chain(args);
    match knotpoints::cli::invoke(argv) {
        Ok(inv) => Ok((inv.exit_code, inv.report.to_json(), inv.stdout)),
        Err((msg, 0)) => Err(PyRuntimeError::new_err(msg)),
        Err((msg, _)) => Err(value_err(msg)),
    }
}

#[pymodule]
#[pyo3(name = "knotpoints")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(nset, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff, m)?)?;
    m.add_function(wrap_pyfunction!(window, m)?)?;
    m.add_function(wrap_pyfunction!(random_function, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents_parse_without_python() {
        let s = parse_set(r#"{"intervals": [["0.25", "1/2"]]}"#).unwrap();
        assert_eq!(pairs(&s), vec![("0.25".to_string(), "0.5".to_string())]);
        assert!(parse_function(r#"{"class": "pwl", "knots": ["0"]}"#).is_err());
    }
}
