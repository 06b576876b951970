//! Python bindings: Bohr sets, invariant maps, walks and the recurrence search.

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use twistlab::bohr::{banach_density_estimate, BohrFile, BohrSetSpec, Membership, SetSource, Window};
use twistlab::exact::{format_rational, parse_rational, TorusPoint, DEFAULT_PRECISION};
use twistlab::harness::{self, ExperimentConfig, Level, RunOptions};
use twistlab::matgroup::GeneratorSystem;
use twistlab::pattern::{self, InvariantMap, PsiValue};
use twistlab::recurrence::{twisted_recurrence_search, Region, TwistConfig};
use twistlab::walks::{self, ConvolutionOptions, WalkMeasure, DEFAULT_ORBIT_CAP};

fn err(e: twistlab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn group(name: &str) -> PyResult<GeneratorSystem> {
    GeneratorSystem::shipped(name).ok_or_else(|| PyValueError::new_err(format!("unknown group {name:?}")))
}

/// A Bohr set `tau^{-1}(U)` in `Z^N`.
#[pyclass(name = "BohrSet", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyBohrSet {
    inner: BohrSetSpec,
}

#[pymethods]
impl PyBohrSet {
    #[staticmethod]
    fn golden_arc() -> Self {
        PyBohrSet { inner: BohrSetSpec::golden_arc() }
    }

    #[staticmethod]
    fn golden_cube() -> Self {
        PyBohrSet { inner: BohrSetSpec::golden_cube() }
    }

    #[staticmethod]
    fn two_frequency_arc() -> Self {
        PyBohrSet { inner: harness::two_frequency_arc() }
    }

    /// Parses a Bohr file given as TOML text.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let spec = BohrFile::parse(text).and_then(|f| f.build(None)).map_err(err)?;
        Ok(PyBohrSet { inner: spec })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    /// Haar measure of `U` as `"p/q"`.
    fn measure(&self) -> String {
        format_rational(&self.inner.measure())
    }

    /// `"in"`, `"out"` or `"boundary"`.
    fn classify(&self, a: Vec<i64>) -> PyResult<&'static str> {
        Ok(match self.inner.member(&a).map_err(err)? {
            Membership::In => "in",
            Membership::Out => "out",
            Membership::Boundary(_) => "boundary",
        })
    }

    fn __contains__(&self, a: Vec<i64>) -> PyResult<bool> {
        Ok(matches!(self.inner.member(&a).map_err(err)?, Membership::In))
    }

    /// Members in the box `[lo, hi]`, lexicographic.
    fn members(&self, lo: Vec<i64>, hi: Vec<i64>) -> PyResult<Vec<Vec<i64>>> {
        let w = Window::new(lo, hi).map_err(err)?;
        Ok(self.inner.enumerate(&w).map_err(err)?.members)
    }

    /// `(count, window size, ratio)` on `[-n, n]^N`.
    fn density(&self, n: i64) -> PyResult<(u64, u128, f64)> {
        let r = banach_density_estimate(&SetSource::Bohr(self.inner.clone()), n, &[]).map_err(err)?;
        Ok((r.count, r.window_size, r.ratio_f64()))
    }

    fn __repr__(&self) -> String {
        format!("BohrSet(rank={}, measure={})", self.inner.rank(), self.measure())
    }
}

/// One of the invariant maps `Psi`.
#[pyclass(name = "InvariantMap", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyInvariantMap {
    inner: InvariantMap,
}

#[pymethods]
impl PyInvariantMap {
    #[staticmethod]
    fn quadratic_form(mu: Vec<i64>, lam: Vec<i64>) -> PyResult<Self> {
        let inner = InvariantMap::QuadraticForm { mu, lambda: lam };
        inner.validate().map_err(err)?;
        Ok(PyInvariantMap { inner })
    }

    #[staticmethod]
    fn q3() -> Self {
        PyInvariantMap { inner: InvariantMap::q3() }
    }

    #[staticmethod]
    fn char_poly(d: usize) -> Self {
        PyInvariantMap { inner: InvariantMap::CharPoly { d } }
    }

    #[staticmethod]
    fn determinant(d: usize) -> Self {
        PyInvariantMap { inner: InvariantMap::Determinant { d } }
    }

    #[staticmethod]
    fn galois_label(d: usize) -> Self {
        PyInvariantMap { inner: InvariantMap::GaloisLabel { d } }
    }

    #[getter]
    fn domain_rank(&self) -> usize {
        self.inner.domain_rank()
    }

    /// `Psi(v)` rendered as text (an integer, a polynomial or a label).
    fn eval(&self, v: Vec<i64>) -> PyResult<String> {
        let big: Vec<BigInt> = v.into_iter().map(BigInt::from).collect();
        Ok(pattern::eval_psi(&self.inner, &big).map_err(err)?.to_string())
    }

    /// Integer targets in `[lo, hi]` against a Bohr_0 set; target -> witness or None.
    #[pyo3(signature = (bohr, lo, hi, r0 = 8, doublings = 8))]
    fn surjectivity(&self, bohr: &PyBohrSet, lo: i64, hi: i64, r0: i64, doublings: u32) -> PyResult<Vec<(i64, Option<Vec<i64>>)>> {
        let targets: Vec<PsiValue> = (lo..=hi).map(|t| PsiValue::Int(BigInt::from(t))).collect();
        let r = pattern::bohr_surjectivity_check(&self.inner, &SetSource::Bohr(bohr.inner.clone()), &targets, r0, doublings, None)
            .map_err(err)?;
        Ok((lo..=hi).zip(r.rows).map(|(t, row)| (t, row.witness)).collect())
    }

    fn __repr__(&self) -> String {
        format!("InvariantMap({:?})", self.inner)
    }
}

/// `(u, v, w)` with `u^2 + v^2 - w^2 = n`.
#[pyfunction]
fn represent_q3(n: i64) -> (i64, i64, i64) {
    let [u, v, w] = pattern::represent_q3(n);
    (u, v, w)
}

/// Galois label of a monic integer polynomial, leading coefficient first.
#[pyfunction]
fn galois_label(poly: Vec<i64>) -> PyResult<String> {
    let big: Vec<BigInt> = poly.into_iter().map(BigInt::from).collect();
    Ok(pattern::galois_label(&big).map_err(err)?.to_string())
}

fn character(chi: &[String]) -> PyResult<TorusPoint> {
    TorusPoint::parse(chi, DEFAULT_PRECISION).map_err(err)
}

/// Monte Carlo Cesàro average under the uniform walk: `(re, im, stderr)`.
#[pyfunction]
#[pyo3(signature = (chi, a, n, samples, seed, group_name = "sl2z"))]
fn mc_cesaro(chi: Vec<String>, a: Vec<i64>, n: usize, samples: usize, seed: u64, group_name: &str) -> PyResult<(f64, f64, f64)> {
    let g = group(group_name)?;
    let e = walks::mc_cesaro(&character(&chi)?, &a, &WalkMeasure::uniform(&g), &g, n, samples, seed, DEFAULT_PRECISION)
        .map_err(err)?;
    Ok((e.value.re, e.value.im, e.stderr()))
}

/// Exact Cesàro average under the uniform walk: `(re, im, dropped_mass)`.
#[pyfunction]
#[pyo3(signature = (chi, a, n, group_name = "sl2z"))]
fn exact_cesaro(chi: Vec<String>, a: Vec<i64>, n: usize, group_name: &str) -> PyResult<(f64, f64, f64)> {
    let g = group(group_name)?;
    let opts = ConvolutionOptions::default();
    let e = walks::exact_cesaro(&character(&chi)?, &a, &WalkMeasure::uniform(&g), &g, n, &opts, DEFAULT_PRECISION)
        .map_err(err)?;
    Ok((e.value.re, e.value.im, e.dropped_mass))
}

/// Predicted limit of the Cesàro averages: `(re, im)`.
#[pyfunction]
#[pyo3(signature = (chi, a, group_name = "sl2z"))]
fn bq_limit_predict(chi: Vec<String>, a: Vec<i64>, group_name: &str) -> PyResult<(f64, f64)> {
    let v = walks::bq_limit_predict(&character(&chi)?, &a, &group(group_name)?, DEFAULT_ORBIT_CAP).map_err(err)?.value();
    Ok((v.re, v.im))
}

/// Twisted recurrence search on a Bohr set's system; returns
/// `(words, shifts, measure "p/q", success)`.
#[pyfunction]
#[pyo3(signature = (bohr, a_list, max_length = 12, epsilon = "1/100", group_name = "sl2z"))]
fn twisted_recurrence(
    bohr: &PyBohrSet,
    a_list: Vec<Vec<i64>>,
    max_length: usize,
    epsilon: &str,
    group_name: &str,
) -> PyResult<(Vec<String>, Vec<Vec<i64>>, String, bool)> {
    let u = Region::from_arcs(bohr.inner.arcs()).map_err(err)?;
    let cfg = TwistConfig::new(a_list, group(group_name)?, max_length, parse_rational(epsilon).map_err(err)?).map_err(err)?;
    let r = twisted_recurrence_search(bohr.inner.system(), &u, &cfg).map_err(err)?;
    Ok((r.words, r.shifts, format_rational(&r.measure), r.success))
}

/// Runs an experiment file; returns `(status, summary lines)`. Reports are
/// written to `out` when given.
#[pyfunction]
#[pyo3(signature = (path, out = None, seed = None))]
fn run_config(path: &str, out: Option<String>, seed: Option<u64>) -> PyResult<(String, Vec<String>)> {
    let loaded = ExperimentConfig::load(std::path::Path::new(path)).map_err(err)?;
    let opts = RunOptions { seed, out: out.map(Into::into), ..Default::default() };
    let outcome = harness::run(&loaded, &opts).map_err(err)?;
    if let Some(dir) = &opts.out {
        harness::write_outputs(&outcome, dir).map_err(err)?;
    }
    Ok((format!("{:?}", outcome.status).to_lowercase(), outcome.summary))
}

/// Acceptance suite: list of `(id, name, passed, detail)`.
#[pyfunction]
#[pyo3(signature = (level = "smoke"))]
fn verify(level: &str) -> PyResult<Vec<(usize, String, bool, String)>> {
    let level: Level = level.parse().map_err(err)?;
    Ok(harness::verify_suite(level, |_| {}).into_iter().map(|r| (r.id, r.name.to_string(), r.passed, r.detail)).collect())
}

#[pymodule]
fn pytwistlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", harness::TOOL_VERSION)?;
    m.add_class::<PyBohrSet>()?;
    m.add_class::<PyInvariantMap>()?;
    m.add_function(wrap_pyfunction!(represent_q3, m)?)?;
    m.add_function(wrap_pyfunction!(galois_label, m)?)?;
    m.add_function(wrap_pyfunction!(mc_cesaro, m)?)?;
    m.add_function(wrap_pyfunction!(exact_cesaro, m)?)?;
    m.add_function(wrap_pyfunction!(bq_limit_predict, m)?)?;
    m.add_function(wrap_pyfunction!(twisted_recurrence, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
