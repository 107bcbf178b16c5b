//! Python bindings: `import mdl`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use mdl_core::covers::{self, CoverNumber};
use mdl_core::reduce;
use mdl_core::stacks::{self, StackCert};
use mdl_core::{catalog, rep, MdlError, Subset};

fn err(e: MdlError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn subset(m: &mdl_core::Matroid, xs: Vec<usize>) -> PyResult<Subset> {
    let s: Subset = xs.into_iter().collect();
    m.check_subset(s).map_err(err)?;
    Ok(s)
}

fn sets(v: &[Subset]) -> Vec<Vec<usize>> {
    v.iter().map(|s| s.to_vec()).collect()
}

#[pyclass(name = "Matroid", module = "mdl", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyMatroid {
    inner: mdl_core::Matroid,
}

fn wrap(r: mdl_core::Result<mdl_core::Matroid>) -> PyResult<PyMatroid> {
    r.map(|inner| PyMatroid { inner }).map_err(err)
}

#[pymethods]
impl PyMatroid {
    #[staticmethod]
    fn uniform(r: usize, n: usize) -> PyResult<Self> {
        wrap(catalog::uniform(r, n))
    }

    #[staticmethod]
    fn fano() -> Self {
        PyMatroid { inner: catalog::fano() }
    }

    /// `PG(n-1, q)`.
    #[staticmethod]
    fn pg(n: usize, q: usize) -> PyResult<Self> {
        wrap(catalog::pg(n, q))
    }

    #[staticmethod]
    #[pyo3(signature = (family, params, seed=0))]
    fn generate(family: &str, params: Vec<String>, seed: u64) -> PyResult<Self> {
        wrap(catalog::gen(family, &params, seed))
    }

    /// Column vectors over `GF(q)`, each of length `rank`.
    #[staticmethod]
    fn from_columns(q: usize, rows: usize, columns: Vec<Vec<usize>>) -> PyResult<Self> {
        let f = catalog::field(q).map_err(err)?;
        let mat = mdl_core::Matrix::from_columns(f, rows, &columns).map_err(err)?;
        wrap(mdl_core::Matroid::linear(mat))
    }

    #[staticmethod]
    fn from_mtd(text: &str) -> PyResult<Self> {
        wrap(catalog::parse_mtd(text))
    }

    #[staticmethod]
    fn direct_sum(parts: Vec<PyMatroid>) -> PyResult<Self> {
        let ms: Vec<_> = parts.into_iter().map(|p| p.inner).collect();
        wrap(mdl_core::Matroid::direct_sum(&ms))
    }

    #[pyo3(signature = (name="m"))]
    fn to_mtd(&self, name: &str) -> PyResult<String> {
        catalog::to_mtd(&self.inner, name, &[]).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.size()
    }

    fn __repr__(&self) -> String {
        format!("Matroid(size={}, rank={})", self.inner.size(), self.inner.full_rank())
    }

    fn ground(&self) -> Vec<usize> {
        self.inner.ground().to_vec()
    }

    #[pyo3(signature = (x=None))]
    fn rank(&self, x: Option<Vec<usize>>) -> PyResult<usize> {
        match x {
            None => Ok(self.inner.full_rank()),
            Some(x) => Ok(self.inner.rank(subset(&self.inner, x)?)),
        }
    }

    fn closure(&self, x: Vec<usize>) -> PyResult<Vec<usize>> {
        Ok(self.inner.closure(subset(&self.inner, x)?).to_vec())
    }

    fn is_flat(&self, x: Vec<usize>) -> PyResult<bool> {
        Ok(self.inner.is_flat(subset(&self.inner, x)?))
    }

    fn flats(&self, k: usize) -> Vec<Vec<usize>> {
        sets(&self.inner.flats_of_rank(k))
    }

    fn epsilon(&self) -> usize {
        self.inner.epsilon()
    }

    fn local_conn(&self, x: Vec<usize>, y: Vec<usize>) -> PyResult<usize> {
        Ok(self.inner.local_conn(subset(&self.inner, x)?, subset(&self.inner, y)?))
    }

    fn is_weakly_round(&self) -> bool {
        self.inner.is_weakly_round()
    }

    fn contract(&self, c: Vec<usize>) -> PyResult<Self> {
        wrap(self.inner.contract(subset(&self.inner, c)?))
    }

    fn delete(&self, d: Vec<usize>) -> PyResult<Self> {
        wrap(self.inner.delete(subset(&self.inner, d)?))
    }

    fn restrict(&self, x: Vec<usize>) -> PyResult<Self> {
        wrap(self.inner.restrict(subset(&self.inner, x)?))
    }
}

/// `(τ_a, cover)`; `τ_a` is `None` when no finite cover exists.
#[pyfunction]
fn tau(m: &PyMatroid, a: usize) -> PyResult<(Option<u128>, Vec<Vec<usize>>)> {
    let (v, cover) = covers::tau(&m.inner, a).map_err(err)?;
    let v = match v {
        CoverNumber::Finite(v) => Some(v),
        CoverNumber::Infinite => None,
    };
    Ok((v, sets(&cover.sets)))
}

/// `(τ^d, cover)`.
#[pyfunction]
fn tau_weighted(m: &PyMatroid, d: u64) -> PyResult<(u128, Vec<Vec<usize>>)> {
    let (v, cover) = covers::tau_weighted(&m.inner, d).map_err(err)?;
    Ok((v, sets(&cover.sets)))
}

#[pyfunction]
fn is_d_thick(m: &PyMatroid, x: Vec<usize>, d: u64) -> PyResult<bool> {
    covers::is_d_thick(&m.inner, subset(&m.inner, x)?, d).map_err(err)
}

/// Rows of a `GF(q)` representation, or `None`.
#[pyfunction]
fn representation(m: &PyMatroid, q: usize) -> PyResult<Option<Vec<Vec<u8>>>> {
    let mat = rep::is_representable(&m.inner, q).map_err(err)?;
    Ok(mat.map(|mat| (0..mat.rows()).map(|i| (0..mat.cols()).map(|j| mat.get(i, j)).collect()).collect()))
}

#[pyfunction]
fn is_pg(m: &PyMatroid, n: usize, q: usize) -> PyResult<bool> {
    rep::is_pg(&m.inner, n, q).map_err(err)
}

/// Layers of an `(h, q, t)`-stack restriction, or `None`.
#[pyfunction]
fn find_stack(m: &PyMatroid, q: usize, h: usize, t: usize) -> PyResult<Option<Vec<Vec<usize>>>> {
    Ok(stacks::find_stack(&m.inner, q, h, t).map_err(err)?.map(|c| sets(&c.parts)))
}

fn cert(m: &PyMatroid, parts: Vec<Vec<usize>>, q: usize, t: usize) -> PyResult<StackCert> {
    let parts = parts.into_iter().map(|p| subset(&m.inner, p)).collect::<PyResult<Vec<_>>>()?;
    Ok(StackCert::new(parts, q, t))
}

/// `None` when the layers form a `(q, t)`-stack restriction, else the reason.
#[pyfunction]
fn stack_violation(m: &PyMatroid, parts: Vec<Vec<usize>>, q: usize, t: usize) -> PyResult<Option<String>> {
    stacks::stack_restriction_violation(&m.inner, &cert(m, parts, q, t)?).map_err(err)
}

/// `(C, layers)` with the layers a stack restriction of `M / C` skew to `X - C`.
#[pyfunction]
fn skew_stack(
    m: &PyMatroid,
    parts: Vec<Vec<usize>>,
    q: usize,
    t: usize,
    x: Vec<usize>,
    a: usize,
    h: usize,
) -> PyResult<(Vec<usize>, Vec<Vec<usize>>)> {
    let s = stacks::skew_stack(&m.inner, &cert(m, parts, q, t)?, subset(&m.inner, x)?, a, h).map_err(err)?;
    Ok((s.contract.to_vec(), sets(&s.cert.parts)))
}

/// `(X, ⊓(X, Y), τ_a(M|X) as a string)`.
#[pyfunction]
fn reduce_connectivity(m: &PyMatroid, y: Vec<usize>, a: usize, b: usize) -> PyResult<(Vec<usize>, usize, String)> {
    let r = reduce::reduce_connectivity(&m.inner, subset(&m.inner, y)?, a, b).map_err(err)?;
    Ok((r.x.to_vec(), r.conn, r.tau_x.to_string()))
}

#[pymodule]
fn mdl(module: &Bound<'_, PyModule>) -> PyResult<()> {
    module.add_class::<PyMatroid>()?;
    module.add_function(wrap_pyfunction!(tau, module)?)?;
    module.add_function(wrap_pyfunction!(tau_weighted, module)?)?;
    module.add_function(wrap_pyfunction!(is_d_thick, module)?)?;
    module.add_function(wrap_pyfunction!(representation, module)?)?;
    module.add_function(wrap_pyfunction!(is_pg, module)?)?;
    module.add_function(wrap_pyfunction!(find_stack, module)?)?;
    module.add_function(wrap_pyfunction!(stack_violation, module)?)?;
    module.add_function(wrap_pyfunction!(skew_stack, module)?)?;
    module.add_function(wrap_pyfunction!(reduce_connectivity, module)?)?;
    Ok(())
}
