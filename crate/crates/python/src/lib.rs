//! Python module `ffv`.
//!
//! Matrices cross the boundary as row-major lists of lists of `complex`;
//! structured reports come back as dicts.

use ffv_core::duality::{
    canonical_gavruta_dual, generate_fusion_dual, kpp_dual_check, sample_annihilating_sequence,
};
use ffv_core::fusion::{classify, excess, fusion_bounds, fusion_frame_operator, FusionSequence, Subspace};
use ffv_core::instance::{generate, Instance, InstanceSpec};
use ffv_core::multipliers::{
    assemble_multiplier, comparison_multiplier_ar, comparison_multiplier_msh, condition_c, reweighting_properties,
    inverse_via_qdagger, multiplier_matrix, riesz_multiplier_verdict, schatten_checks, Symbol,
};
use ffv_core::numerics::{random_gaussian, schatten_norm, Matrix, ToleranceConfig, C64};
use ffv_core::ovf::{
    canonical_ov_dual, dual_span_dimension, embed_fusion, null_bessel_certificate, sample_ov_dual, OvFrame,
};
use ffv_core::suite::{explain as explain_check, run_suite_on_instance, run_suite_random, Suite, SuiteOptions};
use ffv_core::Error;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Rows = Vec<Vec<C64>>;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NumericFailure { .. } | Error::NotInvertible { .. } | Error::NotAFrame { .. } => {
            PyArithmeticError::new_err(e.to_string())
        }
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for ffv_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn to_matrix(rows: &Rows) -> PyResult<Matrix> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err("matrix rows have different lengths"));
    }
    Ok(Matrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn to_rows(m: &Matrix) -> Rows {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn to_matrices(list: &[Rows]) -> PyResult<Vec<Matrix>> {
    list.iter().map(to_matrix).collect()
}

/// Serializes through JSON so that nested reports arrive as plain dicts.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn tol_or_default(tol: Option<&PyTolerance>) -> ToleranceConfig {
    tol.map_or_else(ToleranceConfig::default, |t| t.inner)
}

/// Relative tolerances for rank, equality and invertibility decisions.
#[pyclass(name = "Tolerance", module = "ffv", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTolerance {
    inner: ToleranceConfig,
}

#[pymethods]
impl PyTolerance {
    #[new]
    #[pyo3(signature = (rank_rel=1e-10, eq_rel=1e-8, inv_rel=1e-8))]
    fn new(rank_rel: f64, eq_rel: f64, inv_rel: f64) -> PyResult<Self> {
        Ok(Self {
            inner: ToleranceConfig::new(rank_rel, eq_rel, inv_rel).py()?,
        })
    }

    #[getter]
    fn rank_rel(&self) -> f64 {
        self.inner.rank_rel
    }

    #[getter]
    fn eq_rel(&self) -> f64 {
        self.inner.eq_rel
    }

    #[getter]
    fn inv_rel(&self) -> f64 {
        self.inner.inv_rel
    }

    fn __repr__(&self) -> String {
        let t = &self.inner;
        format!("Tolerance(rank_rel={:e}, eq_rel={:e}, inv_rel={:e})", t.rank_rel, t.eq_rel, t.inv_rel)
    }
}

/// Weighted subspaces `(W_i, w_i)` of `C^n`.
#[pyclass(name = "FusionFrame", module = "ffv", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFusion {
    inner: FusionSequence,
}

#[pymethods]
impl PyFusion {
    /// `spans[i]` lists vectors of length `n` spanning `W_i`; an empty list is
    /// the zero subspace. Weights default to 1 on nonzero blocks.
    #[new]
    #[pyo3(signature = (n, spans, weights=None, tol=None))]
    fn new(n: usize, spans: Vec<Vec<Vec<C64>>>, weights: Option<Vec<f64>>, tol: Option<&PyTolerance>) -> PyResult<Self> {
        let tol = tol_or_default(tol);
        let mut subspaces = Vec::with_capacity(spans.len());
        for (i, vectors) in spans.iter().enumerate() {
            if let Some(v) = vectors.iter().find(|v| v.len() != n) {
                return Err(PyValueError::new_err(format!("block {i}: vector of length {} in C^{n}", v.len())));
            }
            let m = Matrix::from_fn(n, vectors.len(), |r, c| vectors[c][r]);
            subspaces.push(Subspace::from_spanning(&m, &tol).py()?);
        }
        let inner = match weights {
            Some(w) => FusionSequence::new(subspaces, w),
            None => FusionSequence::unweighted(subspaces),
        }
        .py()?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.ambient_dim()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Orthonormal bases, `n x d_i` each.
    fn bases(&self) -> Vec<Rows> {
        self.inner.subspaces().iter().map(|s| to_rows(s.basis())).collect()
    }

    fn projections(&self) -> Vec<Rows> {
        self.inner.subspaces().iter().map(|s| to_rows(&s.projection())).collect()
    }

    fn frame_operator(&self) -> Rows {
        to_rows(&fusion_frame_operator(&self.inner))
    }

    #[pyo3(signature = (tol=None))]
    fn bounds(&self, tol: Option<&PyTolerance>) -> PyResult<(f64, f64)> {
        fusion_bounds(&self.inner, &tol_or_default(tol)).py()
    }

    #[pyo3(signature = (tol=None))]
    fn classify<'py>(&self, py: Python<'py>, tol: Option<&PyTolerance>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &classify(&self.inner, &tol_or_default(tol)).py()?)
    }

    #[pyo3(signature = (tol=None))]
    fn excess<'py>(&self, py: Python<'py>, tol: Option<&PyTolerance>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &excess(&self.inner, &tol_or_default(tol)).py()?)
    }

    fn reweighted(&self, factors: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.reweighted(&factors).py()?,
        })
    }

    /// `(S_W^{-1} W_i, w_i)`.
    #[pyo3(signature = (tol=None))]
    fn canonical_dual(&self, tol: Option<&PyTolerance>) -> PyResult<Self> {
        Ok(Self {
            inner: canonical_gavruta_dual(&self.inner, &tol_or_default(tol)).py()?,
        })
    }

    fn __repr__(&self) -> String {
        format!("FusionFrame(n={}, dims={:?}, weights={:?})", self.n(), self.dims(), self.weights())
    }
}

/// Multiplier symbol `(m_i, R_i)`.
#[pyclass(name = "Symbol", module = "ffv", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySymbol {
    inner: Symbol,
}

#[pymethods]
impl PySymbol {
    #[new]
    fn new(m: Vec<C64>, r: Vec<Rows>) -> PyResult<Self> {
        Ok(Self {
            inner: Symbol::new(m, to_matrices(&r)?).py()?,
        })
    }

    /// `m_i = 1`, `R_i = I`.
    #[staticmethod]
    fn identity(blocks: usize, n: usize) -> Self {
        Self {
            inner: Symbol::identity(blocks, n),
        }
    }

    /// `R_i = I` with the given `m`.
    #[staticmethod]
    fn scalar(m: Vec<C64>, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: Symbol::scalar(m, n).py()?,
        })
    }

    #[getter]
    fn m(&self) -> Vec<C64> {
        self.inner.m().to_vec()
    }

    #[getter]
    fn r(&self) -> Vec<Rows> {
        self.inner.r().iter().map(to_rows).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[pyo3(signature = (tol=None))]
    fn condition_c<'py>(&self, py: Python<'py>, tol: Option<&PyTolerance>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &condition_c(&self.inner, &tol_or_default(tol)).py()?)
    }

    fn __repr__(&self) -> String {
        format!("Symbol(blocks={}, n={})", self.inner.len(), self.inner.dim())
    }
}

/// Generated or loaded `(W, V, symbol)` triple with optional local frames.
#[pyclass(name = "Instance", module = "ffv", frozen)]
struct PyInstance {
    inner: Instance,
}

#[pymethods]
impl PyInstance {
    #[staticmethod]
    #[pyo3(signature = (n, dims, symbol_mode, seed, weight_range=(0.5, 2.0), local_redundancy=None))]
    fn generate(
        n: usize,
        dims: Vec<usize>,
        symbol_mode: &str,
        seed: u64,
        weight_range: (f64, f64),
        local_redundancy: Option<usize>,
    ) -> PyResult<Self> {
        let mut spec = InstanceSpec::new(n, dims, symbol_mode.parse().py()?, seed);
        spec.weight_range = [weight_range.0, weight_range.1];
        spec.local_redundancy = local_redundancy;
        Ok(Self {
            inner: generate(&spec).py()?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: Instance::from_json(text).py()?,
        })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: Instance::load(&path).py()?,
        })
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        self.inner.save(&path).py()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().py()
    }

    #[getter]
    fn spec<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.spec)
    }

    #[getter]
    fn w(&self) -> PyFusion {
        PyFusion { inner: self.inner.w.clone() }
    }

    #[getter]
    fn v(&self) -> PyFusion {
        PyFusion { inner: self.inner.v.clone() }
    }

    #[getter]
    fn symbol(&self) -> PySymbol {
        PySymbol {
            inner: self.inner.symbol.clone(),
        }
    }

    fn __repr__(&self) -> String {
        let s = &self.inner.spec;
        format!("Instance(n={}, dims={:?}, symbol_mode={}, seed={})", s.n, s.dims, s.symbol_mode, s.seed)
    }
}

/// `sum_i m_i v_i w_i P_{V_i} R_i P_{W_i}`.
#[pyfunction]
fn multiplier(symbol: &PySymbol, v: &PyFusion, w: &PyFusion) -> PyResult<Rows> {
    Ok(to_rows(&multiplier_matrix(&symbol.inner, &v.inner, &w.inner).py()?))
}

/// Matrix, extreme singular values, invertibility and the norm bound.
#[pyfunction]
#[pyo3(signature = (symbol, v, w, tol=None))]
fn multiplier_report<'py>(
    py: Python<'py>,
    symbol: &PySymbol,
    v: &PyFusion,
    w: &PyFusion,
    tol: Option<&PyTolerance>,
) -> PyResult<Bound<'py, PyDict>> {
    let r = assemble_multiplier(&symbol.inner, &v.inner, &w.inner, &tol_or_default(tol)).py()?;
    let d = PyDict::new(py);
    d.set_item("matrix", to_rows(&r.matrix))?;
    d.set_item("sigma_min", r.sigma_min)?;
    d.set_item("sigma_max", r.sigma_max)?;
    d.set_item("invertible", r.invertible)?;
    d.set_item("band", to_py(py, &r.band)?)?;
    d.set_item("norm_bound", r.norm_bound)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (symbol, v, w, tol=None))]
fn riesz_verdict<'py>(
    py: Python<'py>,
    symbol: &PySymbol,
    v: &PyFusion,
    w: &PyFusion,
    tol: Option<&PyTolerance>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &riesz_multiplier_verdict(&symbol.inner, &v.inner, &w.inner, &tol_or_default(tol)).py()?)
}

/// Bounds and excesses of the reweighted sequences of an invertible multiplier.
#[pyfunction]
#[pyo3(signature = (symbol, v, w, tol=None))]
fn reweighted_properties<'py>(
    py: Python<'py>,
    symbol: &PySymbol,
    v: &PyFusion,
    w: &PyFusion,
    tol: Option<&PyTolerance>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &reweighting_properties(&symbol.inner, &v.inner, &w.inner, &tol_or_default(tol)).py()?)
}

#[pyfunction]
#[pyo3(signature = (symbol, v, w, p, tol=None))]
fn schatten<'py>(
    py: Python<'py>,
    symbol: &PySymbol,
    v: &PyFusion,
    w: &PyFusion,
    p: f64,
    tol: Option<&PyTolerance>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &schatten_checks(&symbol.inner, &v.inner, &w.inner, p, &tol_or_default(tol)).py()?)
}

/// Inverse of the multiplier through `Q^dagger`, tested against the canonical
/// dual of `{v_i P_{V_i}}` and `duals` random ones.
#[pyfunction]
#[pyo3(signature = (symbol, v, w, duals=5, seed=0, tol=None))]
fn qdagger<'py>(
    py: Python<'py>,
    symbol: &PySymbol,
    v: &PyFusion,
    w: &PyFusion,
    duals: usize,
    seed: u64,
    tol: Option<&PyTolerance>,
) -> PyResult<Bound<'py, PyDict>> {
    let tol = tol_or_default(tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = v.inner.ambient_dim();
    let stacked = v.inner.len() * n;
    let a_v = embed_fusion(&v.inner);
    let sampled = (0..duals)
        .map(|_| sample_ov_dual(&a_v, &random_gaussian(stacked, n, &mut rng), &tol))
        .collect::<ffv_core::Result<Vec<_>>>()
        .py()?;
    let probe = random_gaussian(stacked, n, &mut rng);
    let r = inverse_via_qdagger(&symbol.inner, &v.inner, &w.inner, &sampled, &probe, &tol).py()?;
    let d = PyDict::new(py);
    d.set_item("q_dagger", r.q_dagger.iter().map(to_rows).collect::<Vec<_>>())?;
    d.set_item("duality_residual", r.duality_residual)?;
    d.set_item("representation_residuals", r.representation_residuals.clone())?;
    d.set_item("supplied_dual_residual", r.supplied_dual_residual)?;
    d.set_item("probe_residual", r.probe_residual)?;
    Ok(d)
}

/// `sum_i m_i w_i v_i P_{V_i} P_{W_i}`.
#[pyfunction]
fn multiplier_ar(m: Vec<C64>, v: &PyFusion, w: &PyFusion) -> PyResult<Rows> {
    Ok(to_rows(&comparison_multiplier_ar(&m, &v.inner, &w.inner).py()?))
}

/// `sum_i m_i w_i v_i P_{V_i} S_W^{-1} P_{W_i}`.
#[pyfunction]
#[pyo3(signature = (m, v, w, tol=None))]
fn multiplier_msh(m: Vec<C64>, v: &PyFusion, w: &PyFusion, tol: Option<&PyTolerance>) -> PyResult<Rows> {
    Ok(to_rows(&comparison_multiplier_msh(&m, &v.inner, &w.inner, &tol_or_default(tol)).py()?))
}

/// Classifies `(V, v)` against `(W, w)` with operators `q`.
#[pyfunction]
#[pyo3(signature = (v, w, q, tol=None))]
fn kpp_check<'py>(
    py: Python<'py>,
    v: &PyFusion,
    w: &PyFusion,
    q: Vec<Rows>,
    tol: Option<&PyTolerance>,
) -> PyResult<Bound<'py, PyDict>> {
    let r = kpp_dual_check(&v.inner, &w.inner, &to_matrices(&q)?, &tol_or_default(tol)).py()?;
    let d = PyDict::new(py);
    d.set_item("kind", to_py(py, &r.kind)?)?;
    d.set_item("composite", to_rows(&r.composite))?;
    d.set_item("residual_to_identity", r.residual_to_identity)?;
    d.set_item("sigma_min", r.sigma_min)?;
    d.set_item("sigma_max", r.sigma_max)?;
    d.set_item("admissible", r.admissibility.admissible)?;
    Ok(d)
}

/// Dual `(V, v, Q)` of `(W, w)` whose composite equals `u`, perturbed by a
/// random annihilating sequence of size `scale`.
#[pyfunction]
#[pyo3(signature = (w, u, seed=0, scale=1.0, tol=None))]
fn generate_dual(
    w: &PyFusion,
    u: Rows,
    seed: u64,
    scale: f64,
    tol: Option<&PyTolerance>,
) -> PyResult<(PyFusion, Vec<Rows>)> {
    let tol = tol_or_default(tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = sample_annihilating_sequence(&w.inner, scale, &mut rng, &tol).py()?;
    let g = generate_fusion_dual(&w.inner, &to_matrix(&u)?, &l, &tol).py()?;
    Ok((PyFusion { inner: g.v }, g.q.iter().map(to_rows).collect()))
}

fn ov_frame(blocks: &[Rows]) -> PyResult<OvFrame> {
    let ms = to_matrices(blocks)?;
    let (k, n) = ms.first().map_or((0, 0), |m| m.shape());
    OvFrame::new(n, k, ms).py()
}

/// Blocks `k x n` of the canonical dual of the operator-valued frame `blocks`.
#[pyfunction]
#[pyo3(signature = (blocks, tol=None))]
fn ov_canonical_dual(blocks: Vec<Rows>, tol: Option<&PyTolerance>) -> PyResult<Vec<Rows>> {
    let d = canonical_ov_dual(&ov_frame(&blocks)?, &tol_or_default(tol)).py()?;
    Ok(d.dual().blocks().iter().map(to_rows).collect())
}

#[pyfunction]
#[pyo3(signature = (blocks, tol=None))]
fn ov_dual_span_dimension(blocks: Vec<Rows>, tol: Option<&PyTolerance>) -> PyResult<usize> {
    dual_span_dimension(&ov_frame(&blocks)?, &tol_or_default(tol)).py()
}

#[pyfunction]
#[pyo3(signature = (blocks, tol=None))]
fn ov_null_bessel_certificate(blocks: Vec<Rows>, tol: Option<&PyTolerance>) -> PyResult<usize> {
    null_bessel_certificate(&ov_frame(&blocks)?, &tol_or_default(tol)).py()
}

#[pyfunction]
fn schatten_norm_of(matrix: Rows, p: f64) -> PyResult<f64> {
    schatten_norm(&to_matrix(&matrix)?, p).py()
}

/// Runs a suite on `instance`, or on `random` generated instances from `seed`.
#[pyfunction]
#[pyo3(signature = (suite, instance=None, random=None, seed=0, compare_ar=false, tol=None))]
fn run_suite<'py>(
    py: Python<'py>,
    suite: &str,
    instance: Option<&PyInstance>,
    random: Option<usize>,
    seed: u64,
    compare_ar: bool,
    tol: Option<&PyTolerance>,
) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().py()?;
    let opts = SuiteOptions {
        tol: tol_or_default(tol),
        compare_ar,
    };
    let report = match (instance, random) {
        (Some(inst), None) => run_suite_on_instance(suite, &inst.inner, &opts),
        (None, Some(count)) => run_suite_random(suite, count, seed, &opts),
        _ => return Err(PyValueError::new_err("pass exactly one of instance or random")),
    }
    .py()?;
    to_py(py, &report)
}

#[pyfunction]
fn explain(check: &str) -> PyResult<String> {
    explain_check(check).py()
}

#[pymodule]
fn ffv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTolerance>()?;
    m.add_class::<PyFusion>()?;
    m.add_class::<PySymbol>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(multiplier, m)?)?;
    m.add_function(wrap_pyfunction!(multiplier_report, m)?)?;
    m.add_function(wrap_pyfunction!(riesz_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(reweighted_properties, m)?)?;
    m.add_function(wrap_pyfunction!(schatten, m)?)?;
    m.add_function(wrap_pyfunction!(qdagger, m)?)?;
    m.add_function(wrap_pyfunction!(multiplier_ar, m)?)?;
    m.add_function(wrap_pyfunction!(multiplier_msh, m)?)?;
    m.add_function(wrap_pyfunction!(kpp_check, m)?)?;
    m.add_function(wrap_pyfunction!(generate_dual, m)?)?;
    m.add_function(wrap_pyfunction!(ov_canonical_dual, m)?)?;
    m.add_function(wrap_pyfunction!(ov_dual_span_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(ov_null_bessel_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(schatten_norm_of, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(explain, m)?)?;
    Ok(())
}
