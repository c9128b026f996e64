//! Python bindings: symbols, HPL reductions, dissection counts and
//! numerical evaluation, all with string expressions in and out.

use polysym::alphabet::{Alphabet, Bounds};
use polysym::exact_arith::{parse_rational, vars, Vars};
use polysym::hpl::{self, HplIndex, ReduceOptions};
use polysym::mpl::{grow_alphabet, symbol_of, FuncExpr};
use polysym::numeric::eval_mpl;
use polysym::polygon::enumerate_maximal_dissections;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn session(names: &str) -> Vars {
    let v: Vec<&str> = names.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    vars(&v)
}

fn parse_with_alphabet(exprs: &[&str], names: &str) -> PyResult<(Vec<FuncExpr>, Alphabet)> {
    let v = session(names);
    let es = exprs.iter().map(|e| FuncExpr::parse(e, &v).map_err(value_err)).collect::<PyResult<Vec<_>>>()?;
    let mut a = Alphabet::empty(&v);
    for e in &es {
        grow_alphabet(e, &mut a).map_err(value_err)?;
    }
    Ok((es, a))
}

/// Symbol of an expression as text, over the letters it needs.
#[pyfunction]
#[pyo3(signature = (expr, vars = "x"))]
fn symbol(expr: &str, vars: &str) -> PyResult<String> {
    let (es, a) = parse_with_alphabet(&[expr], vars)?;
    let s = symbol_of(&es[0], &a).map_err(value_err)?;
    Ok(if s.is_zero() { "0".into() } else { s.display(&a) })
}

/// Symbol as a JSON string with the alphabet.
#[pyfunction]
#[pyo3(signature = (expr, vars = "x"))]
fn symbol_json(expr: &str, vars: &str) -> PyResult<String> {
    let (es, a) = parse_with_alphabet(&[expr], vars)?;
    let s = symbol_of(&es[0], &a).map_err(value_err)?;
    let j = serde_json::json!({ "alphabet": a.to_json(), "symbol": s.to_json(&a) });
    Ok(j.to_string())
}

/// True when both expressions have the same symbol.
#[pyfunction]
#[pyo3(signature = (lhs, rhs, vars = "x"))]
fn same_symbol(lhs: &str, rhs: &str, vars: &str) -> PyResult<bool> {
    let (es, a) = parse_with_alphabet(&[lhs, rhs], vars)?;
    Ok(symbol_of(&es[0], &a).map_err(value_err)? == symbol_of(&es[1], &a).map_err(value_err)?)
}

/// Reduction of `H(index; x)` onto the spanning set.
#[pyfunction]
#[pyo3(signature = (index, digits = 40))]
fn hpl_reduce(index: Vec<i8>, digits: u32) -> PyResult<String> {
    let h = HplIndex::new(index).map_err(value_err)?;
    let opts = ReduceOptions { digits, ..ReduceOptions::default() };
    let r = hpl::hpl_reduce(&h, &opts).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(r.expression.to_string())
}

/// Number of maximal dissections of an n-gon.
#[pyfunction]
fn count_dissections(n: usize) -> usize {
    enumerate_maximal_dissections(n).len()
}

/// `(s, α, β, γ, δ)` for every solution within the default bounds.
#[pyfunction]
fn table2() -> Vec<(i8, i64, i64, i64, i64)> {
    hpl::table2_enumerate(Bounds::default()).into_iter().map(|r| (r.s, r.alpha, r.beta, r.gamma, r.delta)).collect()
}

/// Decimal value of an expression at rational point(s) given as strings.
#[pyfunction]
#[pyo3(signature = (expr, at, digits = 40, vars = "x"))]
fn evaluate(expr: &str, at: Vec<String>, digits: u32, vars: &str) -> PyResult<String> {
    let v = session(vars);
    let e = FuncExpr::parse(expr, &v).map_err(value_err)?;
    let p = at.iter().map(|s| parse_rational(s).map_err(value_err)).collect::<PyResult<Vec<_>>>()?;
    let val = eval_mpl(&e, &p, digits).map_err(value_err)?;
    Ok(val.to_decimal(digits))
}

#[pymodule]
fn polysym_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(symbol, m)?)?;
    m.add_function(wrap_pyfunction!(symbol_json, m)?)?;
    m.add_function(wrap_pyfunction!(same_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(hpl_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(count_dissections, m)?)?;
    m.add_function(wrap_pyfunction!(table2, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    Ok(())
}
