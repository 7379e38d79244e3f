//! Python bindings: exact counts, identity checks and tiling combinatorics.
//!
//! Exact rationals cross the boundary as `(numerator, denominator)` pairs of
//! decimal strings; structured reports as JSON strings, so nothing is ever
//! rounded.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use charvar::charcount::{
    additive_mu_stack_count, stack_count, surface_circle_stack_count, twisted_count,
    twisted_variety_count, untwisted_count, CountRecord,
};
use charvar::ffield::FiniteField;
use charvar::tileforge::{builtin_tiling, dual_quiver, find_cuts, potential_of, BraneTiling};
use charvar::Limits;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn limits_from(max_iterations: Option<u128>) -> Limits {
    match max_iterations {
        Some(v) => Limits::with_max(v),
        None => Limits::default(),
    }
}

fn rational_pair(rec: &CountRecord) -> (String, String) {
    (rec.value.numer().to_string(), rec.value.denom().to_string())
}

/// A finite field GF(p^k) with a fixed canonical modulus.
#[pyclass(name = "Field", frozen)]
struct PyField {
    inner: FiniteField,
}

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (p, k = 1))]
    fn new(p: u64, k: usize) -> PyResult<Self> {
        Ok(PyField {
            inner: FiniteField::new(p, k).map_err(err)?,
        })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q()
    }

    /// Multiplicative orders that admit a primitive root in this field.
    fn has_root_of_order(&self, n: u64) -> bool {
        n >= 1 && (self.inner.q() - 1) % n == 0
    }

    fn __repr__(&self) -> String {
        format!("Field(p={}, k={})", self.inner.p(), self.inner.k())
    }
}

/// A bipartite surface tiling given as a rotation system.
#[pyclass(name = "Tiling", frozen)]
struct PyTiling {
    inner: BraneTiling,
}

impl PyTiling {
    fn tiling(&self) -> &BraneTiling {
        &self.inner
    }
}

#[pymethods]
impl PyTiling {
    /// Load from a JSON document {"edges": ..., "white": [...], "black": [...]}.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyTiling {
            inner: BraneTiling::from_json(text).map_err(err)?,
        })
    }

    /// One of the built-in names: hex-torus, square-torus, genus2.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        builtin_tiling(name)
            .map(|inner| PyTiling { inner })
            .ok_or_else(|| err(format!("no built-in tiling named {name}")))
    }

    #[getter]
    fn edges(&self) -> usize {
        self.inner.edges
    }

    #[getter]
    fn vertices(&self) -> usize {
        self.inner.vertices()
    }

    #[getter]
    fn faces(&self) -> usize {
        self.inner.face_count()
    }

    #[getter]
    fn genus(&self) -> usize {
        self.inner.genus
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Arrows of the dual quiver as (source, target) pairs.
    fn dual_arrows(&self) -> Vec<(usize, usize)> {
        dual_quiver(&self.inner)
            .arrows
            .iter()
            .map(|a| (a.source, a.target))
            .collect()
    }

    /// All cuts of the dual potential, in lexicographic order.
    fn cuts(&self) -> Vec<Vec<usize>> {
        let q = dual_quiver(&self.inner);
        let w = potential_of(&self.inner, &q);
        find_cuts(&q, &w)
            .into_iter()
            .map(|c| c.into_iter().collect())
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Tiling(edges={}, vertices={}, faces={}, genus={})",
            self.inner.edges,
            self.inner.vertices(),
            self.inner.face_count(),
            self.inner.genus
        )
    }
}

/// One exact count.  kind is one of: twisted, untwisted, twisted-variety,
/// twisted-stack, untwisted-stack, surface-circle, mu-stack.
/// Returns (numerator, denominator) as decimal strings.
#[pyfunction]
#[pyo3(signature = (kind, n, g, p, k = 1, max_iterations = None))]
fn count(
    kind: &str,
    n: usize,
    g: usize,
    p: u64,
    k: usize,
    max_iterations: Option<u128>,
) -> PyResult<(String, String)> {
    let f = FiniteField::new(p, k).map_err(err)?;
    let limits = limits_from(max_iterations);
    let rec = match kind {
        "twisted" => twisted_count(n, g, &f, &limits),
        "untwisted" => untwisted_count(n, g, &f, &limits),
        "twisted-variety" => twisted_variety_count(n, g, &f, &limits),
        "twisted-stack" => twisted_count(n, g, &f, &limits).and_then(|r| stack_count(&r)),
        "untwisted-stack" => untwisted_count(n, g, &f, &limits).and_then(|r| stack_count(&r)),
        "surface-circle" => surface_circle_stack_count(n, g, &f, &limits),
        "mu-stack" => additive_mu_stack_count(n, g, &f, &limits),
        other => return Err(err(format!("unknown count kind {other}"))),
    }
    .map_err(err)?;
    Ok(rational_pair(&rec))
}

/// Verify Exp(twisted series) = untwisted series up to degree n_max.
/// mode is "numeric" (needs p) or "polynomial".  Returns (pass, report_json).
#[pyfunction]
#[pyo3(signature = (g, n_max, mode = "numeric", p = None, max_iterations = None))]
fn verify_exp(
    g: usize,
    n_max: usize,
    mode: &str,
    p: Option<u64>,
    max_iterations: Option<u128>,
) -> PyResult<(bool, String)> {
    let limits = limits_from(max_iterations);
    let report = match mode {
        "numeric" => {
            let p = p.ok_or_else(|| err("numeric mode needs p"))?;
            charvar::plethys::verify_exp_numeric(g, n_max, p, &limits).map_err(err)?
        }
        "polynomial" => {
            let needed = charvar::exactq::degree_bound_for(n_max, g) + 1;
            let mut primes = Vec::new();
            let mut c = 3u64;
            while primes.len() <= needed {
                if (2..c).take_while(|d| d * d <= c).all(|d| c % d != 0) {
                    primes.push(c);
                }
                c += 1;
            }
            let samples: Vec<(u64, usize)> = primes[..needed].iter().map(|&p| (p, 1)).collect();
            charvar::plethys::verify_exp_polynomial(
                g,
                n_max,
                &samples,
                Some((primes[needed], 1)),
                &limits,
            )
            .map_err(err)?
        }
        other => return Err(err(format!("unknown mode {other}"))),
    };
    let pass = report.pass;
    Ok((pass, serde_json::to_string(&report).map_err(err)?))
}

/// Linear-fiber counting identity for one cut of a tiling's dual potential.
/// Returns (pass, report_json); raises on mismatch.
#[pyfunction]
#[pyo3(signature = (tiling, gamma, p, k = 1, cut_index = 0, max_iterations = None))]
fn dimred_check(
    tiling: &PyTiling,
    gamma: usize,
    p: u64,
    k: usize,
    cut_index: usize,
    max_iterations: Option<u128>,
) -> PyResult<(bool, String)> {
    let t = tiling.tiling();
    let q = dual_quiver(t);
    let w = potential_of(t, &q);
    let cuts = find_cuts(&q, &w);
    let cut = cuts
        .get(cut_index)
        .ok_or_else(|| err(format!("cut index {cut_index} out of range ({})", cuts.len())))?;
    let f = FiniteField::new(p, k).map_err(err)?;
    let dims = vec![gamma; q.vertices];
    let report =
        charvar::repscan::dimred_count_check(&q, &w, cut, &dims, &f, &limits_from(max_iterations))
            .map_err(err)?;
    let pass = report.pass;
    Ok((pass, serde_json::to_string(&report).map_err(err)?))
}

/// Reduced-algebra stack count vs the untwisted character-stack count.
#[pyfunction]
#[pyo3(signature = (tiling, n, p, k = 1, max_iterations = None))]
fn morita_check(
    tiling: &PyTiling,
    n: usize,
    p: u64,
    k: usize,
    max_iterations: Option<u128>,
) -> PyResult<(bool, String)> {
    let f = FiniteField::new(p, k).map_err(err)?;
    let report =
        charvar::repscan::morita_count_check(tiling.tiling(), n, &f, &limits_from(max_iterations))
            .map_err(err)?;
    let pass = report.pass;
    Ok((pass, serde_json::to_string(&report).map_err(err)?))
}

/// Localized-algebra stack count vs the surface x circle groupoid count.
#[pyfunction]
#[pyo3(signature = (tiling, n, p, k = 1, max_iterations = None))]
fn gtrue_check(
    tiling: &PyTiling,
    n: usize,
    p: u64,
    k: usize,
    max_iterations: Option<u128>,
) -> PyResult<(bool, String)> {
    let f = FiniteField::new(p, k).map_err(err)?;
    let report =
        charvar::repscan::gtrue_count_check(tiling.tiling(), n, &f, &limits_from(max_iterations))
            .map_err(err)?;
    let pass = report.pass;
    Ok((pass, serde_json::to_string(&report).map_err(err)?))
}

/// Run the acceptance suite (optionally a single 1-based criterion).
/// Returns (all_pass, results_json).
#[pyfunction]
#[pyo3(signature = (only = None, max_iterations = None))]
fn audit(only: Option<usize>, max_iterations: Option<u128>) -> PyResult<(bool, String)> {
    let limits = limits_from(max_iterations);
    let results = match only {
        Some(id) => vec![charvar::audit::run_one(id, &limits)],
        None => charvar::audit::run_all(&limits),
    };
    let pass = results.iter().all(|r| r.pass);
    Ok((pass, serde_json::to_string(&results).map_err(err)?))
}

#[pymodule]
fn charvar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyTiling>()?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(verify_exp, m)?)?;
    m.add_function(wrap_pyfunction!(dimred_check, m)?)?;
    m.add_function(wrap_pyfunction!(morita_check, m)?)?;
    m.add_function(wrap_pyfunction!(gtrue_check, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    Ok(())
}
