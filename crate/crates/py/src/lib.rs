//! Python bindings: scenarios, closure, forcing, extension and the oracle.
//!
//! Elements cross the boundary by label; pairs come back as
//! `(better, worse, strict)` tuples.

use coherent_core::oracle::{WeakOrder, DEFAULT_CAP};
use coherent_core::solver::{ExtensionResult, PairStatus, PairVerdict};
use coherent_core::{self as core, Fact, GeneratorSpec, RelationState, Solver};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

type Pairs = Vec<(String, String, bool)>;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Scenario", module = "coherent", frozen)]
pub struct PyScenario {
    inner: core::Scenario,
}

impl PyScenario {
    fn id(&self, label: &str) -> PyResult<usize> {
        self.inner
            .find(label)
            .ok_or_else(|| PyKeyError::new_err(format!("no element labelled {label:?}")))
    }

    fn strong(&self, strong: Option<bool>) -> PyResult<bool> {
        match strong {
            None => Ok(self.inner.is_commutative()),
            Some(true) if !self.inner.is_commutative() => {
                Err(err(core::Error::StrongNotAdmissible))
            }
            Some(s) => Ok(s),
        }
    }

    fn facts(&self, facts: impl IntoIterator<Item = Fact>) -> Pairs {
        facts
            .into_iter()
            .map(|f| (self.label(f.x), self.label(f.y), f.strict))
            .collect()
    }

    fn label(&self, x: usize) -> String {
        self.inner.label(x).to_owned()
    }

    fn verdict<'py>(&self, py: Python<'py>, v: &PairVerdict) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        d.set_item("first", self.label(v.first))?;
        d.set_item("second", self.label(v.second))?;
        let status = match v.status {
            PairStatus::ForcedStrict { above, .. } => {
                d.set_item("above", self.label(above))?;
                "forced_strict"
            }
            PairStatus::ForcedIndifferent => "forced_indifferent",
            PairStatus::Free => "free_within_window",
            PairStatus::LocallyUnextendable => "locally_unextendable",
        };
        d.set_item("status", status)?;
        let surviving: Vec<String> = v
            .surviving
            .iter()
            .map(|o| format!("{o:?}").to_lowercase())
            .collect();
        d.set_item("surviving", surviving)?;
        Ok(d)
    }

    fn classes(&self, e: &RelationState) -> Vec<Vec<String>> {
        let order = WeakOrder::from_state(e).expect("complete extension");
        let mut classes = vec![Vec::new(); order.class_count()];
        for (x, &l) in order.levels().iter().enumerate() {
            classes[l].push(self.label(x));
        }
        classes
    }
}

#[pymethods]
impl PyScenario {
    /// Parse a scenario document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyScenario {
            inner: core::load_scenario(text).map_err(err)?,
        })
    }

    /// Build a scenario from a generator spec such as `"two-track:5"`.
    #[staticmethod]
    #[pyo3(signature = (spec, seed = 0))]
    fn generate(spec: &str, seed: u64) -> PyResult<Self> {
        let spec: GeneratorSpec = spec.parse().map_err(err)?;
        Ok(PyScenario {
            inner: spec.with_seed(seed).build().map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn labels(&self) -> Vec<String> {
        self.inner
            .elements()
            .iter()
            .map(|e| e.label.clone())
            .collect()
    }

    fn generators(&self) -> Vec<String> {
        self.inner
            .generators()
            .iter()
            .map(|g| g.name().to_owned())
            .collect()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_owned()
    }

    #[getter]
    fn commutative(&self) -> bool {
        self.inner.is_commutative()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario({:?}, {} elements)",
            self.inner.name(),
            self.inner.len()
        )
    }
}

/// Generator pairs that fail to commute, as `(g, h, element)`.
#[pyfunction]
fn check_commutativity(s: &PyScenario) -> Vec<(String, String, String)> {
    let gens = s.inner.generators();
    core::check_commutativity(&s.inner)
        .into_iter()
        .map(|v| {
            (
                gens[v.first].name().to_owned(),
                gens[v.second].name().to_owned(),
                s.label(v.element),
            )
        })
        .collect()
}

/// Saturated seed: `(consistent, pairs)`.
#[pyfunction]
#[pyo3(signature = (s, strong = None))]
fn saturate(s: &PyScenario, strong: Option<bool>) -> PyResult<(bool, Pairs)> {
    let st = core::saturate(&core::seed(&s.inner), &s.inner, s.strong(strong)?);
    Ok((st.is_consistent(), s.facts(st.facts())))
}

#[pyfunction]
fn classify_pair<'py>(
    py: Python<'py>,
    s: &PyScenario,
    first: &str,
    second: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let (x, y) = (s.id(first)?, s.id(second)?);
    let solver = Solver::for_scenario(&s.inner);
    let v = solver
        .classify_pair(&solver.base_state(), x, y)
        .map_err(err)?;
    s.verdict(py, &v)
}

/// Indifference classes best first, or `None` when no extension exists.
#[pyfunction]
fn complete_extension(s: &PyScenario) -> Option<Vec<Vec<String>>> {
    match core::complete_extension(&s.inner) {
        ExtensionResult::Sat(e) => Some(s.classes(&e)),
        ExtensionResult::Unsat(_) => None,
    }
}

#[pyfunction]
fn forced_set_exact<'py>(py: Python<'py>, s: &PyScenario) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let forced = core::forced_set_exact(&s.inner).map_err(err)?;
    forced.values().map(|v| s.verdict(py, v)).collect()
}

#[pyfunction]
#[pyo3(signature = (s, cap = DEFAULT_CAP))]
fn oracle_forced_set<'py>(
    py: Python<'py>,
    s: &PyScenario,
    cap: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let forced = core::oracle_forced_set(&s.inner, cap).map_err(err)?;
    forced.values().map(|v| s.verdict(py, v)).collect()
}

/// Number of coherent weak-order extensions on the window.
#[pyfunction]
#[pyo3(signature = (s, cap = DEFAULT_CAP))]
fn oracle_count(s: &PyScenario, cap: usize) -> PyResult<usize> {
    Ok(core::oracle_extensions(&s.inner, cap).map_err(err)?.len())
}

/// Forced pairs reachable neither by transitivity alone nor by coherency alone.
#[pyfunction]
fn novel_pairs(s: &PyScenario) -> PyResult<Pairs> {
    let solver = Solver::for_scenario(&s.inner);
    let forced = solver.forced_set().map_err(err)?;
    let full = core::forced_relation(s.inner.len(), &forced);
    Ok(s.facts(core::novel_pairs(&full, &s.inner, solver.is_strong())))
}

/// Audit a weak order given as classes best first; returns check name to result.
#[pyfunction]
fn verify(s: &PyScenario, classes: Vec<Vec<String>>) -> PyResult<Vec<(String, bool)>> {
    let mut levels = vec![usize::MAX; s.inner.len()];
    for (l, class) in classes.iter().enumerate() {
        for label in class {
            levels[s.id(label)?] = l;
        }
    }
    if levels.contains(&usize::MAX) {
        return Err(PyValueError::new_err("classes must cover every element"));
    }
    let order =
        WeakOrder::from_levels(levels).ok_or_else(|| PyValueError::new_err("empty class"))?;
    let report = core::verify_extension(&s.inner, &order.to_state());
    Ok(report
        .checks
        .into_iter()
        .map(|c| (c.name.to_owned(), c.passed))
        .collect())
}

#[pymodule]
fn coherent(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(check_commutativity, m)?)?;
    m.add_function(wrap_pyfunction!(saturate, m)?)?;
    m.add_function(wrap_pyfunction!(classify_pair, m)?)?;
    m.add_function(wrap_pyfunction!(complete_extension, m)?)?;
    m.add_function(wrap_pyfunction!(forced_set_exact, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_forced_set, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_count, m)?)?;
    m.add_function(wrap_pyfunction!(novel_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
