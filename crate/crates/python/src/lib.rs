//! Python bindings. Rationals cross the boundary as `"p/q"` strings (so
//! `fractions.Fraction(s)` reads them back), digits as Python ints.

use num_bigint::BigUint;
use pierce_lab::lab::{enumerate_lambda_k, hdim_upper_refined, CoverParams};
use pierce_lab::sequence::phi_finite;
use pierce_lab::{
    build_sigma_alpha, digits_rational, dual_representation, fundamental_interval, lambda_certified, lambda_truncated,
    parse_rational, shift_orbit, witness_in_interval, BigRational, DigitPrefix, Error, PierceSeq, RatInterval,
    DEFAULT_PRECISION_BITS,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pierce_lab_py, GuardExceeded, PyException, "A work guard was exceeded.");

fn py_err(e: Error) -> PyErr {
    if e.is_domain() {
        PyValueError::new_err(e.to_string())
    } else {
        GuardExceeded::new_err(e.to_string())
    }
}

fn rational(s: &str) -> PyResult<BigRational> {
    parse_rational(s).map_err(py_err)
}

fn prefix(digits: Vec<BigUint>) -> PyResult<DigitPrefix> {
    DigitPrefix::new(digits).map_err(py_err)
}

/// Pierce digits of the rational `x` in `[0, 1]`.
#[pyfunction]
fn digits(x: &str) -> PyResult<Vec<BigUint>> {
    Ok(digits_rational(&rational(x)?).map_err(py_err)?.into_vec())
}

/// Both digit sequences evaluating to the rational `x` in `(0, 1)`.
#[pyfunction]
fn dual(x: &str) -> PyResult<(Vec<BigUint>, Vec<BigUint>)> {
    let (sigma, tau) = dual_representation(&rational(x)?).map_err(py_err)?;
    Ok((sigma.into_vec(), tau.into_vec()))
}

/// Exact value of a finite digit sequence.
#[pyfunction]
fn phi(sigma: Vec<BigUint>) -> PyResult<String> {
    Ok(phi_finite(&prefix(sigma)?).to_string())
}

/// `(left, right, diameter)` of the fundamental interval of `sigma`.
#[pyfunction]
fn cell(sigma: Vec<BigUint>) -> PyResult<(String, String, String)> {
    let f = fundamental_interval(&prefix(sigma)?).map_err(py_err)?;
    Ok((f.left.to_string(), f.right.to_string(), f.diameter.to_string()))
}

/// `T(x), ..., T^n(x)`.
#[pyfunction]
fn orbit(x: &str, n: usize) -> PyResult<Vec<String>> {
    let pts = shift_orbit(&rational(x)?, n).map_err(py_err)?;
    Ok(pts.iter().map(ToString::to_string).collect())
}

/// First `n` terms of the power-floor (or tower, at `alpha = 0`) sequence.
#[pyfunction]
fn sigma_alpha_terms(sigma: Vec<BigUint>, alpha: &str, n: usize) -> PyResult<Vec<BigUint>> {
    let rule = build_sigma_alpha(&prefix(sigma)?, &rational(alpha)?).map_err(py_err)?;
    Ok(rule.terms(n))
}

/// Certified exponent and the tail-window enclosure `(lo, hi)` up to `n_max`.
#[pyfunction]
fn sigma_alpha_lambda(sigma: Vec<BigUint>, alpha: &str, n_max: u64) -> PyResult<(String, (String, String))> {
    let rule = build_sigma_alpha(&prefix(sigma)?, &rational(alpha)?).map_err(py_err)?;
    let cert = lambda_certified(&rule).map_err(py_err)?;
    let est = lambda_truncated(&PierceSeq::Infinite(rule), n_max).map_err(py_err)?;
    let v = est.sup_value;
    Ok((cert.to_string(), (v.lo().to_string(), v.hi().to_string())))
}

/// A certified witness of exponent `alpha` inside `[lo, hi]`.
#[pyfunction]
#[pyo3(signature = (alpha, lo, hi, bits = DEFAULT_PRECISION_BITS))]
fn witness<'py>(py: Python<'py>, alpha: &str, lo: &str, hi: &str, bits: u32) -> PyResult<Bound<'py, PyDict>> {
    let u = RatInterval::new(rational(lo)?, rational(hi)?).map_err(py_err)?;
    let w = witness_in_interval(&u, &rational(alpha)?, bits).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("family", w.rule.family())?;
    d.set_item("prefix", w.cylinder.sigma.into_vec())?;
    d.set_item(
        "enclosure",
        (w.enclosure.lo().to_string(), w.enclosure.hi().to_string()),
    )?;
    d.set_item("certificate", w.certificate.to_string())?;
    Ok(d)
}

/// Size of the covering layer of length `k`.
#[pyfunction]
fn layer_count(n: u64, alpha: &str, beta: &str, eps: &str, k: u64) -> PyResult<BigUint> {
    let one = BigRational::from_integer(1.into());
    let p = CoverParams::new(n, rational(alpha)?, rational(beta)?, rational(eps)?, one, k.max(n)).map_err(py_err)?;
    Ok(enumerate_lambda_k(&p, k, false).map_err(py_err)?.count)
}

/// Dimension bound from an `n_parts` partition of `[alpha, beta]`.
#[pyfunction]
fn refined_bound(alpha: &str, beta: &str, n_parts: u64) -> PyResult<String> {
    Ok(hdim_upper_refined(&rational(alpha)?, &rational(beta)?, n_parts)
        .map_err(py_err)?
        .to_string())
}

#[pymodule]
fn pierce_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GuardExceeded", m.py().get_type::<GuardExceeded>())?;
    m.add_function(wrap_pyfunction!(digits, m)?)?;
    m.add_function(wrap_pyfunction!(dual, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(cell, m)?)?;
    m.add_function(wrap_pyfunction!(orbit, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_alpha_terms, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_alpha_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(layer_count, m)?)?;
    m.add_function(wrap_pyfunction!(refined_bound, m)?)?;
    Ok(())
}
