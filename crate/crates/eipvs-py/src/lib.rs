//! Python bindings exposing the main types and operations: series algebra,
//! elastic inner products and distances, the precomputed index, sequence
//! similarity, orthogonalization and synthetic data.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use eipvs::elastic::{ElasticParams, TimeKernel};
use eipvs::index::Grid;
use eipvs::series::{LabeledDataset, Split};

fn err(e: eipvs::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_kernel(name: &str) -> PyResult<TimeKernel> {
    match name {
        "gaussian" => Ok(TimeKernel::Gaussian),
        "laplace" => Ok(TimeKernel::Laplace),
        other => Err(PyValueError::new_err(format!(
            "unknown time kernel {other:?} (expected gaussian or laplace)"
        ))),
    }
}

fn params(nu: f64, kernel: &str) -> PyResult<ElasticParams> {
    Ok(ElasticParams::eip_with_kernel(nu, parse_kernel(kernel)?))
}

/// A validated time series: strictly increasing timestamps, no all-zero
/// sample values.
#[pyclass(name = "TimeSeries", from_py_object)]
#[derive(Clone)]
struct PyTimeSeries {
    inner: eipvs::TimeSeries,
}

#[pymethods]
impl PyTimeSeries {
    /// Values are sample-major; timestamps default to 1..n.
    #[new]
    #[pyo3(signature = (values, timestamps=None, dim=1))]
    fn new(values: Vec<f64>, timestamps: Option<Vec<f64>>, dim: usize) -> PyResult<Self> {
        let inner = match timestamps {
            Some(ts) => eipvs::TimeSeries::new(values, ts, dim),
            None => {
                if dim == 1 {
                    eipvs::TimeSeries::univariate(values)
                } else {
                    let n = values.len() / dim.max(1);
                    let ts = (1..=n).map(|i| i as f64).collect();
                    eipvs::TimeSeries::new(values, ts, dim)
                }
            }
        };
        Ok(Self { inner: inner.map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (dim=1))]
    fn empty(dim: usize) -> Self {
        Self { inner: eipvs::TimeSeries::empty(dim) }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("TimeSeries(len={}, dim={})", self.inner.len(), self.inner.dim())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn timestamps(&self) -> Vec<f64> {
        self.inner.timestamps().to_vec()
    }

    /// Elementwise scalar multiple; zero collapses to the empty series.
    fn scale(&self, factor: f64) -> Self {
        Self { inner: self.inner.scale(factor) }
    }

    /// Timestamp-merging addition with exact-zero discard.
    fn oplus(&self, other: &PyTimeSeries) -> PyResult<Self> {
        Ok(Self { inner: self.inner.oplus(&other.inner).map_err(err)? })
    }

    /// Coordinate-major embedding on a grid of timestamps.
    fn embed_on_grid(&self, grid: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.embed_on_grid(&grid).map_err(err)
    }

    fn normalize_timestamps(&self) -> Self {
        Self { inner: self.inner.normalize_timestamps() }
    }
}

/// Elastic inner product of two series.
#[pyfunction]
#[pyo3(signature = (a, b, nu, kernel="gaussian"))]
fn eip(a: &PyTimeSeries, b: &PyTimeSeries, nu: f64, kernel: &str) -> PyResult<f64> {
    eipvs::eip(&a.inner, &b.inner, &params(nu, kernel)?).map_err(err)
}

/// Norm induced by the elastic inner product.
#[pyfunction]
#[pyo3(signature = (a, nu, kernel="gaussian"))]
fn eip_norm(a: &PyTimeSeries, nu: f64, kernel: &str) -> PyResult<f64> {
    eipvs::eip_norm(&a.inner, &params(nu, kernel)?).map_err(err)
}

/// Distance induced by the elastic inner product (expansion form).
#[pyfunction]
#[pyo3(signature = (a, b, nu, kernel="gaussian"))]
fn eip_distance(a: &PyTimeSeries, b: &PyTimeSeries, nu: f64, kernel: &str) -> PyResult<f64> {
    eipvs::eip_distance(&a.inner, &b.inner, &params(nu, kernel)?).map_err(err)
}

/// Plain Euclidean distance on aligned equal-length series.
#[pyfunction]
fn euclidean_distance(a: &PyTimeSeries, b: &PyTimeSeries) -> PyResult<f64> {
    eipvs::eval::euclidean_distance(&a.inner, &b.inner).map_err(err)
}

/// Unconstrained DTW with squared Euclidean local cost.
#[pyfunction]
fn dtw_distance(a: &PyTimeSeries, b: &PyTimeSeries) -> PyResult<f64> {
    eipvs::eval::dtw_distance(&a.inner, &b.inner).map_err(err)
}

/// Elastic cosine similarity of two token sequences (indicator weighting).
#[pyfunction]
#[pyo3(signature = (a, b, nu))]
fn ecos(a: Vec<String>, b: Vec<String>, nu: f64) -> PyResult<f64> {
    let sa = eipvs::seq::SymbolSequence::new(a).map_err(err)?;
    let sb = eipvs::seq::SymbolSequence::new(b).map_err(err)?;
    eipvs::seq::ecos(&sa, &sb, nu, &eipvs::seq::Weighting::Indicator).map_err(err)
}

/// Gram-Schmidt orthogonalization under the elastic inner product.
#[pyfunction]
#[pyo3(signature = (family, nu, kernel="gaussian"))]
fn gram_schmidt(family: Vec<PyTimeSeries>, nu: f64, kernel: &str) -> PyResult<Vec<PyTimeSeries>> {
    let series: Vec<eipvs::TimeSeries> = family.into_iter().map(|s| s.inner).collect();
    let basis = eipvs::ortho::gram_schmidt(&series, &params(nu, kernel)?).map_err(err)?;
    Ok(basis.into_iter().map(|inner| PyTimeSeries { inner }).collect())
}

/// Cylinder-bell-funnel synthetic dataset as `(label, values)` pairs.
#[pyfunction]
#[pyo3(signature = (per_class, length=128, seed=42))]
fn cbf_generate(per_class: usize, length: usize, seed: u64) -> PyResult<Vec<(String, Vec<f64>)>> {
    let dataset = eipvs::eval::cbf_generate(per_class, length, seed).map_err(err)?;
    Ok(dataset
        .iter()
        .map(|(s, label)| (label.clone(), s.values().to_vec()))
        .collect())
}

/// Precomputed elastic index over labeled series.
#[pyclass(name = "ElasticIndex")]
struct PyElasticIndex {
    inner: eipvs::index::ElasticIndex,
}

#[pymethods]
impl PyElasticIndex {
    #[new]
    #[pyo3(signature = (series, labels, nu, kernel="gaussian"))]
    fn new(series: Vec<PyTimeSeries>, labels: Vec<String>, nu: f64, kernel: &str) -> PyResult<Self> {
        if series.len() != labels.len() {
            return Err(PyValueError::new_err("series and labels must have equal length"));
        }
        let entries: Vec<(eipvs::TimeSeries, String)> =
            series.into_iter().map(|s| s.inner).zip(labels).collect();
        let dataset = LabeledDataset::new("python", Split::Train, entries);
        let inner = eipvs::index::ElasticIndex::build(&dataset, Grid::Auto, nu, parse_kernel(kernel)?)
            .map_err(err)?;
        Ok(Self { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.inner.matrix().nu()
    }

    #[getter]
    fn grid(&self) -> Vec<f64> {
        self.inner.matrix().grid().to_vec()
    }

    /// Elastic inner products of the query against every indexed item.
    fn query_scores(&self, query: &PyTimeSeries) -> PyResult<Vec<(String, f64)>> {
        self.inner.query_scores(&query.inner).map_err(err)
    }

    /// The k nearest items as `(id, label, distance)` triples.
    #[pyo3(signature = (query, k=1))]
    fn query_knn(&self, query: &PyTimeSeries, k: usize) -> PyResult<Vec<(String, String, f64)>> {
        Ok(self
            .inner
            .query_knn(&query.inner, k)
            .map_err(err)?
            .into_iter()
            .map(|n| (n.id, n.label, n.distance))
            .collect())
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(path).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self { inner: eipvs::index::ElasticIndex::load(path).map_err(err)? })
    }
}

#[pymodule]
fn eipvs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTimeSeries>()?;
    m.add_class::<PyElasticIndex>()?;
    m.add_function(wrap_pyfunction!(eip, m)?)?;
    m.add_function(wrap_pyfunction!(eip_norm, m)?)?;
    m.add_function(wrap_pyfunction!(eip_distance, m)?)?;
    m.add_function(wrap_pyfunction!(euclidean_distance, m)?)?;
    m.add_function(wrap_pyfunction!(dtw_distance, m)?)?;
    m.add_function(wrap_pyfunction!(ecos, m)?)?;
    m.add_function(wrap_pyfunction!(gram_schmidt, m)?)?;
    m.add_function(wrap_pyfunction!(cbf_generate, m)?)?;
    Ok(())
}
