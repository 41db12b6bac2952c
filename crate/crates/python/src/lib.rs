//! Python module `prefmatch_py`. Applicant and post ids are 1-based on the
//! Python side, as in the text formats; matchings are lists of `(a, p)` pairs.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use prefmatch::aupcr::compute_aupcr;
use prefmatch::gen::{generate as gen_instance, Density, GenSpec, Model};
use prefmatch::harness::{solve_with, Algorithm};
use prefmatch::oracle::oracle_optima;
use prefmatch::{metrics, Error, Matching};

fn py_err(e: Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        4 => PyIOError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_matching(inst: &prefmatch::Instance, pairs: Vec<(usize, usize)>) -> PyResult<Matching> {
    let zero_based = pairs
        .into_iter()
        .map(|(a, p)| {
            if a == 0 || p == 0 {
                Err(PyValueError::new_err("ids are 1-based"))
            } else {
                Ok((a - 1, p - 1))
            }
        })
        .collect::<PyResult<Vec<_>>>()?;
    let m = Matching::new(zero_based).map_err(py_err)?;
    inst.validate_matching(&m).map_err(py_err)?;
    Ok(m)
}

fn from_matching(m: &Matching) -> Vec<(usize, usize)> {
    m.pairs().iter().map(|&(a, p)| (a + 1, p + 1)).collect()
}

/// A one-sided preference instance.
#[pyclass(module = "prefmatch_py", frozen)]
struct Instance {
    inner: prefmatch::Instance,
}

#[pymethods]
impl Instance {
    /// `prefs[i]` lists the posts of applicant `i + 1` from best to worst.
    #[new]
    fn new(n_posts: usize, prefs: Vec<Vec<usize>>) -> PyResult<Self> {
        let prefs = prefs
            .into_iter()
            .map(|l| {
                l.into_iter()
                    .map(|p| {
                        p.checked_sub(1)
                            .ok_or_else(|| PyValueError::new_err("ids are 1-based"))
                    })
                    .collect::<PyResult<Vec<_>>>()
            })
            .collect::<PyResult<Vec<_>>>()?;
        let inner = prefmatch::Instance::new(n_posts, prefs).map_err(py_err)?;
        Ok(Instance { inner })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = prefmatch::parse_instance(text).map_err(py_err)?;
        Ok(Instance { inner })
    }

    #[getter]
    fn n_applicants(&self) -> usize {
        self.inner.n_applicants()
    }

    #[getter]
    fn n_posts(&self) -> usize {
        self.inner.n_posts()
    }

    #[getter]
    fn prefs(&self) -> Vec<Vec<usize>> {
        self.inner
            .pref_lists()
            .iter()
            .map(|l| l.iter().map(|p| p + 1).collect())
            .collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// Matching produced by `algo` (pom, rmm, popm, fm, amm or mcamm).
    fn solve(&self, algo: &str) -> PyResult<Vec<(usize, usize)>> {
        let algo: Algorithm = algo.parse().map_err(py_err)?;
        let (m, _) = solve_with(algo, &self.inner).map_err(py_err)?;
        Ok(from_matching(&m))
    }

    /// `(AUPC, TA)` of a matching.
    fn aupcr(&self, matching: Vec<(usize, usize)>) -> PyResult<(u64, u64)> {
        let m = to_matching(&self.inner, matching)?;
        let v = compute_aupcr(&self.inner, &m).map_err(py_err)?;
        Ok((v.numerator, v.denominator))
    }

    /// `(counts per rank, unmatched)`.
    fn signature(&self, matching: Vec<(usize, usize)>) -> PyResult<(Vec<u64>, u64)> {
        let m = to_matching(&self.inner, matching)?;
        let s = prefmatch::signature_of(&self.inner, &m).map_err(py_err)?;
        Ok((s.per_rank, s.unmatched))
    }

    fn unpopularity_margin(&self, matching: Vec<(usize, usize)>) -> PyResult<i64> {
        let m = to_matching(&self.inner, matching)?;
        prefmatch::unpopularity_margin(&self.inner, &m).map_err(py_err)
    }

    /// Every metric of a matching; decimals are six-digit strings.
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        matching: Vec<(usize, usize)>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let m = to_matching(&self.inner, matching)?;
        let r = metrics::evaluate_all(&self.inner, &m, 0.0).map_err(py_err)?;
        let d = PyDict::new_bound(py);
        d.set_item("cardinality", r.cardinality)?;
        d.set_item("margin", r.margin)?;
        d.set_item(
            "unpopularity",
            metrics::fixed6(*r.unpopularity.numer(), *r.unpopularity.denom()),
        )?;
        d.set_item("rank1", r.rank1)?;
        d.set_item("aupcr", (r.aupcr.numerator, r.aupcr.denominator))?;
        d.set_item("rhpl", r.rhpl)?;
        d.set_item(
            "avg_rank",
            r.avg_rank.map(|a| metrics::fixed6(*a.numer(), *a.denom())),
        )?;
        d.set_item("worst_rank", r.worst_rank)?;
        Ok(d)
    }

    /// Exhaustive optima; at most eight applicants.
    fn oracle<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let o = oracle_optima(&self.inner).map_err(py_err)?;
        let d = PyDict::new_bound(py);
        d.set_item(
            "max_aupcr",
            (o.max_aupcr.numerator, o.max_aupcr.denominator),
        )?;
        d.set_item("mcamm_card", o.mcamm_card)?;
        d.set_item("min_amm_card", o.min_amm_card)?;
        d.set_item("max_cardinality", o.max_cardinality)?;
        d.set_item("min_margin", o.min_margin)?;
        d.set_item("popular_exists", o.popular_exists)?;
        d.set_item("matching_count", o.matching_count)?;
        d.set_item(
            "rank_maximal_signature",
            (
                o.rank_maximal_signature.per_rank,
                o.rank_maximal_signature.unmatched,
            ),
        )?;
        d.set_item(
            "fair_signature",
            (o.fair_signature.per_rank, o.fair_signature.unmatched),
        )?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(applicants={}, posts={}, edges={})",
            self.inner.n_applicants(),
            self.inner.n_posts(),
            self.inner.edge_count()
        )
    }
}

/// Seeded random instance; `model` is "uni" or "hc", `density` a decimal string.
#[pyfunction]
#[pyo3(signature = (model, n, density, seed, posts=None))]
fn generate(
    model: &str,
    n: usize,
    density: &str,
    seed: u64,
    posts: Option<usize>,
) -> PyResult<Instance> {
    let model: Model = model.parse().map_err(py_err)?;
    let density: Density = density.parse().map_err(py_err)?;
    let inner = gen_instance(&GenSpec {
        model,
        n_applicants: n,
        n_posts: posts.unwrap_or(n),
        density,
        seed,
    })
    .map_err(py_err)?;
    Ok(Instance { inner })
}

#[pymodule]
fn prefmatch_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
