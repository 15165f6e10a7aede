use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use unitfrob_core::arith::FieldCtx;
use unitfrob_core::catalog::{cover_poly, global_dual_of_sheaf, SheafSpec};
use unitfrob_core::cli::{run_case as run_case_impl, CaseFile, LocalSpec, RunOptions, SCHEMA_VERSION};
use unitfrob_core::global::{chi_lower_bound as bound_impl, etale_chi as etale_chi_impl};
use unitfrob_core::local::{check_unit, Frame, IndexValue, LocalUnitModule};
use unitfrob_core::oracle::hasse_witt_genus1;
use unitfrob_core::Error;

create_exception!(unitfrob, UnitFrobError, PyException, "Domain error raised by the core library.");
create_exception!(unitfrob, SchemaError, UnitFrobError, "Malformed case file or arguments.");
create_exception!(unitfrob, OracleMismatchError, UnitFrobError, "Pipeline and oracle disagree.");

fn to_py(e: Error) -> PyErr {
    let msg = format!("[{}] {e}", e.module());
    match e {
        Error::Schema(_) => SchemaError::new_err(msg),
        Error::OracleMismatch(_) => OracleMismatchError::new_err(msg),
        _ => UnitFrobError::new_err(msg),
    }
}

fn pair(v: IndexValue) -> (i64, i64) {
    (v.num(), v.den())
}

/// A local unit module `K^m + A^s` over `F_{p^(r e)}` with `q = p^r`.
/// Entries of `b` are Laurent polynomials in `t` such as `"t^-2 + 3*t"`.
#[pyclass(name = "LocalModule", module = "unitfrob", frozen)]
struct PyLocalModule {
    inner: LocalUnitModule,
}

#[pymethods]
impl PyLocalModule {
    #[new]
    #[pyo3(signature = (p, m, s, b, r = 1, field_ext = 1))]
    fn new(p: u64, m: usize, s: usize, b: Vec<Vec<String>>, r: u32, field_ext: u32) -> PyResult<Self> {
        let spec = LocalSpec { m, s, b };
        let inner = spec.module(p, r, field_ext).map_err(to_py)?;
        Ok(PyLocalModule { inner })
    }

    /// `K e` with `F(e) = t^d e`.
    #[staticmethod]
    #[pyo3(signature = (p, d, r = 1))]
    fn twist(p: u64, d: i64, r: u32) -> PyResult<Self> {
        let ctx = FieldCtx::new(p, r, 1).map_err(to_py)?;
        Ok(PyLocalModule { inner: LocalUnitModule::twist(&ctx, d) })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn s(&self) -> usize {
        self.inner.s()
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q()
    }

    fn is_unit(&self) -> bool {
        check_unit(&self.inner).is_ok()
    }

    /// Hermite exponents of the minimal root.
    fn minimal_root_exponents(&self) -> PyResult<Vec<i64>> {
        let l = Frame::new(&self.inner).and_then(|f| f.minimal_root()).map_err(to_py)?;
        Ok(l.exponents().to_vec())
    }

    fn minimal_root(&self) -> PyResult<String> {
        let l = Frame::new(&self.inner).and_then(|f| f.minimal_root()).map_err(to_py)?;
        Ok(l.to_string())
    }

    /// `(num, den)` of the minimal root index.
    fn minimal_root_index(&self) -> PyResult<(i64, i64)> {
        let f = Frame::new(&self.inner).map_err(to_py)?;
        let l = f.minimal_root().map_err(to_py)?;
        Ok(pair(f.index_of(&l)))
    }

    fn __repr__(&self) -> String {
        format!("LocalModule(q={}, m={}, s={})", self.inner.q(), self.inner.m(), self.inner.s())
    }
}

/// Run a case file given as a JSON string and return the JSON report.
#[pyfunction]
#[pyo3(signature = (case_json, name = "case", oracle = false, seed = 0))]
fn run_case(case_json: &str, name: &str, oracle: bool, seed: u64) -> PyResult<String> {
    let case = CaseFile::from_json(case_json).map_err(to_py)?;
    let opts = RunOptions { oracle, seed, ..RunOptions::default() };
    Ok(run_case_impl(name, &case, &opts).map_err(to_py)?.to_json())
}

/// Cohomology report of the dual of a sheaf spec (JSON in, JSON out).
#[pyfunction]
#[pyo3(signature = (spec_json, p, r = 1, field_ext = 1))]
fn etale_chi(spec_json: &str, p: u64, r: u32, field_ext: u32) -> PyResult<String> {
    let spec: SheafSpec = serde_json::from_str(spec_json).map_err(|e| to_py(Error::Schema(e.to_string())))?;
    let gm = global_dual_of_sheaf(&spec, p, r, field_ext).map_err(to_py)?;
    let rep = etale_chi_impl(&gm).map_err(to_py)?;
    Ok(serde_json::to_string(&rep).expect("serializable"))
}

/// `(1 - g) n - sum of indices`, as `(num, den)`.
#[pyfunction]
#[pyo3(signature = (n, indices, g = 0))]
fn chi_lower_bound(n: usize, indices: Vec<(i64, i64)>, g: u64) -> PyResult<(i64, i64)> {
    if indices.iter().any(|&(_, d)| d <= 0) {
        return Err(to_py(Error::InvalidInput("index denominators must be positive".into())));
    }
    let values: Vec<IndexValue> = indices.into_iter().map(|(a, b)| IndexValue::new(a, b)).collect();
    let b = bound_impl(n, g, &values);
    Ok((*b.numer(), *b.denom()))
}

/// p-rank of `y^2 = f(x)` for a cubic or quartic `f` over `F_p`.
#[pyfunction]
fn hasse_witt(f: &str, p: u64) -> PyResult<u32> {
    let ctx = FieldCtx::new(p, 1, 1).map_err(to_py)?;
    let poly = cover_poly(f, &ctx).map_err(to_py)?;
    Ok(hasse_witt_genus1(&poly).map_err(to_py)?.p_rank())
}

#[pymodule]
fn unitfrob(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SCHEMA_VERSION", SCHEMA_VERSION)?;
    m.add("UnitFrobError", m.py().get_type::<UnitFrobError>())?;
    m.add("SchemaError", m.py().get_type::<SchemaError>())?;
    m.add("OracleMismatchError", m.py().get_type::<OracleMismatchError>())?;
    m.add_class::<PyLocalModule>()?;
    m.add_function(wrap_pyfunction!(run_case, m)?)?;
    m.add_function(wrap_pyfunction!(etale_chi, m)?)?;
    m.add_function(wrap_pyfunction!(chi_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(hasse_witt, m)?)?;
    Ok(())
}
