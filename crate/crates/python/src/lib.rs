//! Python bindings: graphs of groups go in and out as JSON documents.

use std::collections::BTreeSet;

use grushko::decompose::{DecomposeError, Decomposition as RustDecomposition};
use grushko::gersten::{ConjClassSequence, GerstenError};
use grushko::stallings::stallings_representative;
use grushko::{Basis, DecomposeConfig, GerstenConfig, Word};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn decompose_error(e: DecomposeError) -> PyErr {
    match e {
        DecomposeError::InvalidInput(_) | DecomposeError::RelativePreconditionFailed(_) => value_error(e),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn config(max_moves: usize, max_rank: usize) -> DecomposeConfig {
    DecomposeConfig { max_moves, gersten: GerstenConfig { max_rank } }
}

fn parse_words(words: &[String], basis: &Basis) -> PyResult<Vec<Word>> {
    words
        .iter()
        .map(|s| {
            let w = Word::parse(s).map_err(value_error)?;
            basis.check_word(&w).map_err(value_error)?;
            Ok(w)
        })
        .collect()
}

#[pyclass(module = "pygrushko", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct GraphOfGroups {
    inner: grushko::GraphOfGroups,
}

#[pymethods]
impl GraphOfGroups {
    #[staticmethod]
    pub fn from_json(text: &str) -> PyResult<Self> {
        grushko::GraphOfGroups::from_json(text).map(|inner| GraphOfGroups { inner }).map_err(value_error)
    }

    pub fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Violations as messages; empty when the document is usable.
    pub fn validate(&self) -> Vec<String> {
        self.inner.validate().iter().map(ToString::to_string).collect()
    }

    pub fn vertices(&self) -> Vec<(String, Vec<String>)> {
        self.inner
            .vertices()
            .iter()
            .map(|(v, b)| (v.clone(), b.symbols().iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    pub fn edge_ids(&self) -> Vec<String> {
        self.inner.edges().iter().map(|e| e.id.clone()).collect()
    }

    pub fn measure(&self) -> String {
        self.inner.measure().to_string()
    }

    pub fn presentation(&self) -> String {
        grushko::presentation(&self.inner).to_string()
    }

    /// `(betti, torsion)` of the fundamental group's abelianization.
    pub fn abelianization(&self) -> (usize, Vec<u128>) {
        let a = grushko::abelianization(&grushko::presentation(&self.inner));
        (a.betti, a.torsion)
    }

    #[pyo3(signature = (max_moves = 1_000_000, max_rank = 8))]
    pub fn decompose(&self, max_moves: usize, max_rank: usize) -> PyResult<Decomposition> {
        grushko::decompose(&self.inner, &config(max_moves, max_rank))
            .map(|inner| Decomposition { inner })
            .map_err(decompose_error)
    }

    /// The free rank when the fundamental group is free, else `None`.
    #[pyo3(signature = (max_moves = 1_000_000, max_rank = 8))]
    pub fn is_free(&self, max_moves: usize, max_rank: usize) -> PyResult<Option<usize>> {
        grushko::is_free(&self.inner, &config(max_moves, max_rank)).map_err(decompose_error)
    }

    #[pyo3(signature = (vertex, edge, max_moves = 1_000_000, max_rank = 8))]
    pub fn relative_decompose(
        &self,
        vertex: &str,
        edge: &str,
        max_moves: usize,
        max_rank: usize,
    ) -> PyResult<Decomposition> {
        grushko::relative_decompose(&self.inner, vertex, edge, &config(max_moves, max_rank))
            .map(|inner| Decomposition { inner })
            .map_err(decompose_error)
    }

    fn __repr__(&self) -> String {
        format!("GraphOfGroups({} vertices, {} edges)", self.inner.vertices().len(), self.inner.edges().len())
    }
}

#[pyclass(module = "pygrushko", frozen)]
pub struct Decomposition {
    inner: RustDecomposition,
}

#[pymethods]
impl Decomposition {
    #[getter]
    pub fn free_rank(&self) -> usize {
        self.inner.free_rank
    }

    #[getter]
    pub fn factors(&self) -> Vec<GraphOfGroups> {
        self.inner.factors.iter().map(|f| GraphOfGroups { inner: f.graph.clone() }).collect()
    }

    #[getter]
    pub fn flagged_factor(&self) -> Option<usize> {
        self.inner.factors.iter().position(|f| f.flagged)
    }

    /// Trace lines, one per applied move.
    #[getter]
    pub fn log(&self) -> Vec<String> {
        self.inner.log.iter().map(ToString::to_string).collect()
    }

    pub fn is_free(&self) -> bool {
        self.inner.is_free()
    }

    pub fn to_json(&self) -> String {
        self.inner.to_value().to_string()
    }

    fn __repr__(&self) -> String {
        format!("Decomposition(free_rank={}, factors={})", self.inner.free_rank, self.inner.factors.len())
    }
}

#[pyfunction]
#[pyo3(signature = (word, basis, max_rank = 8))]
pub fn is_primitive(word: &str, basis: Vec<String>, max_rank: usize) -> PyResult<bool> {
    let basis = Basis::from_names(&basis).map_err(value_error)?;
    let w = Word::parse(word).map_err(value_error)?;
    grushko::is_primitive(&w, &basis, &GerstenConfig { max_rank }).map_err(|e| match e {
        GerstenError::RankTooLarge { .. } | GerstenError::IdentityWord | GerstenError::Word(_) => value_error(e),
        _ => PyRuntimeError::new_err(e.to_string()),
    })
}

/// Text dumps of the folded based graph of each generating set.
#[pyfunction]
pub fn stallings(basis: Vec<String>, subgroups: Vec<Vec<String>>) -> PyResult<Vec<String>> {
    let basis = Basis::from_names(&basis).map_err(value_error)?;
    let gens = subgroups.iter().map(|g| parse_words(g, &basis)).collect::<PyResult<Vec<_>>>()?;
    let seq = stallings_representative(&gens, &basis).map_err(value_error)?;
    Ok(seq.components.iter().map(|c| c.dump(true)).collect())
}

/// `(complexity, minlex, visible)` of a minimal representative, with
/// `visible` the kind of the first visible simplification or `None`.
#[pyfunction]
#[pyo3(signature = (basis, subgroups, max_rank = 8))]
pub fn gersten(
    basis: Vec<String>,
    subgroups: Vec<Vec<String>>,
    max_rank: usize,
) -> PyResult<(usize, usize, Option<String>)> {
    let basis = Basis::from_names(&basis).map_err(value_error)?;
    let gens = subgroups.iter().map(|g| parse_words(g, &basis)).collect::<PyResult<Vec<_>>>()?;
    let tags = (0..gens.len()).map(|i| i.to_string()).collect();
    let seq = ConjClassSequence::from_generators(&gens, &basis, tags).map_err(value_error)?;
    let config = GerstenConfig { max_rank };
    let rep = grushko::gersten_representative(&seq, &config).map_err(value_error)?;
    let visible = grushko::detect_visible(&rep.sequence, &BTreeSet::new(), &config).map_err(value_error)?;
    Ok((rep.sequence.complexity(), rep.sequence.minlex(), visible.map(|v| v.kind().to_string())))
}

#[pymodule]
fn pygrushko(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<GraphOfGroups>()?;
    m.add_class::<Decomposition>()?;
    m.add_function(wrap_pyfunction!(is_primitive, m)?)?;
    m.add_function(wrap_pyfunction!(stallings, m)?)?;
    m.add_function(wrap_pyfunction!(gersten, m)?)?;
    Ok(())
}
