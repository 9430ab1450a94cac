//! Python bindings: host graphs plus the cospectrality operations, as a
//! `cmc` extension module. Polynomials cross the boundary as descending
//! coefficient lists of Python ints, matching the sidecar file format.

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cmc_core::charpoly::{charpoly, vertex_deleted_charpolys};
use cmc_core::coalescence::concrete_coalescence_charpoly;
use cmc_core::cospectral::{self, CoalescenceSpec};
use cmc_core::families::PathFamilyParams;
use cmc_core::gen;
use cmc_core::graph::{self, graph6_decode, graph6_encode, RootedGraph, MAX_VERTICES};
use cmc_core::poly::{IntPoly, Signature};
use cmc_core::search::{self, SearchOptions};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn desc(p: &IntPoly) -> Vec<BigInt> {
    p.coeffs_desc()
}

/// An undirected graph on at most 64 vertices.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Graph {
    inner: graph::Graph,
}

impl Graph {
    fn wrap(inner: graph::Graph) -> Graph {
        Graph { inner }
    }
}

#[pymethods]
impl Graph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        if n > MAX_VERTICES {
            return Err(err(format!(
                "{n} vertices, more than the supported {MAX_VERTICES}"
            )));
        }
        for &(u, v) in &edges {
            if u >= n || v >= n || u == v {
                return Err(err(format!("bad edge ({u}, {v}) on {n} vertices")));
            }
        }
        Ok(Graph::wrap(graph::Graph::from_edges(n, &edges)))
    }

    /// Path on n >= 1 vertices with edges i -- i+1.
    #[staticmethod]
    fn path(n: usize) -> PyResult<Self> {
        Ok(Graph::wrap(graph::Graph::path(n).map_err(err)?))
    }

    #[staticmethod]
    fn complete(n: usize) -> PyResult<Self> {
        if n > MAX_VERTICES {
            return Err(err(format!(
                "{n} vertices, more than the supported {MAX_VERTICES}"
            )));
        }
        Ok(Graph::wrap(graph::Graph::complete(n)))
    }

    #[staticmethod]
    fn from_graph6(text: &str) -> PyResult<Self> {
        Ok(Graph::wrap(graph6_decode(text.trim()).map_err(err)?))
    }

    fn to_graph6(&self) -> PyResult<String> {
        graph6_encode(&self.inner).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    /// Characteristic polynomial of the adjacency matrix, descending.
    fn charpoly(&self) -> Vec<BigInt> {
        desc(&charpoly(&self.inner))
    }

    /// charpoly of the graph minus vertex v, indexed by v.
    fn vertex_deleted_charpolys(&self) -> Vec<Vec<BigInt>> {
        vertex_deleted_charpolys(&self.inner)
            .iter()
            .map(desc)
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, edges={:?})",
            self.inner.n(),
            self.inner.edges()
        )
    }

    fn __eq__(&self, other: &Graph) -> bool {
        self.inner == other.inner
    }
}

fn spec(graph: &Graph, selection: Vec<usize>, signature: Vec<u32>) -> PyResult<CoalescenceSpec> {
    let sig = Signature::new(signature).map_err(err)?;
    CoalescenceSpec::new(graph.inner.clone(), selection, sig).map_err(err)
}

/// Components of the Hosoya vector of (graph, selection, signature):
/// component l sums the charpolys of all l-subset deletions of the selected
/// vertices, weighted by the products of their multiplicities.
#[pyfunction]
fn hosoya_vector(
    graph: &Graph,
    selection: Vec<usize>,
    signature: Vec<u32>,
) -> PyResult<Vec<Vec<BigInt>>> {
    let v = cospectral::hosoya_vector(&spec(graph, selection, signature)?);
    Ok(v.components().iter().map(desc).collect())
}

/// True iff the two specs attach cospectrally for every rooted graph, i.e.
/// their Hosoya vectors agree.
#[pyfunction]
fn vectors_equal(
    graph1: &Graph,
    selection1: Vec<usize>,
    graph2: &Graph,
    selection2: Vec<usize>,
    signature: Vec<u32>,
) -> PyResult<bool> {
    let s1 = spec(graph1, selection1, signature.clone())?;
    let s2 = spec(graph2, selection2, signature)?;
    Ok(cospectral::hosoya_vector(&s1) == cospectral::hosoya_vector(&s2))
}

/// True iff some multiplicity-preserving bijection of the selections makes
/// all corresponding subset deletions cospectral.
#[pyfunction]
fn exists_removal_correspondence(
    graph1: &Graph,
    selection1: Vec<usize>,
    graph2: &Graph,
    selection2: Vec<usize>,
    signature: Vec<u32>,
) -> PyResult<bool> {
    let s1 = spec(graph1, selection1, signature.clone())?;
    let s2 = spec(graph2, selection2, signature)?;
    cospectral::exists_removal_correspondence(&s1, &s2).map_err(err)
}

/// The coalescence made by attaching `signature[i]` copies of the rooted
/// graph (attach, root) at `selection[i]`.
#[pyfunction]
fn build_coalescence(
    host: &Graph,
    selection: Vec<usize>,
    signature: Vec<u32>,
    attach: &Graph,
    root: usize,
) -> PyResult<Graph> {
    let sig = Signature::new(signature).map_err(err)?;
    let rooted = RootedGraph::new(attach.inner.clone(), root).map_err(err)?;
    let built = graph::build_coalescence(&host.inner, &selection, &sig, &rooted).map_err(err)?;
    Ok(Graph::wrap(built))
}

/// charpoly of that coalescence, computed by symbolic expansion instead of
/// by building the graph.
#[pyfunction]
fn coalescence_charpoly(
    host: &Graph,
    selection: Vec<usize>,
    signature: Vec<u32>,
    attach: &Graph,
    root: usize,
) -> PyResult<Vec<BigInt>> {
    let sig = Signature::new(signature).map_err(err)?;
    let rooted = RootedGraph::new(attach.inner.clone(), root).map_err(err)?;
    let p = concrete_coalescence_charpoly(&host.inner, &selection, &sig, &rooted).map_err(err)?;
    Ok(desc(&p))
}

/// Exhaustive search over the cospectral group: every class of vector-equal
/// specs with signature entries at most `mse`, as dicts with keys
/// signature, removal_cospectral, members (graph_index, selection), vector.
#[pyfunction]
#[pyo3(signature = (graphs, mse, max_k=None, dedup_automorphisms=false))]
fn find_matches(
    py: Python<'_>,
    graphs: Vec<Graph>,
    mse: u32,
    max_k: Option<usize>,
    dedup_automorphisms: bool,
) -> PyResult<Vec<Py<PyDict>>> {
    let group: Vec<graph::Graph> = graphs.iter().map(|g| g.inner.clone()).collect();
    let options = SearchOptions {
        mse,
        max_k,
        jobs: None,
        dedup_automorphisms,
    };
    let classes = search::find_matches(&group, &options).map_err(err)?;
    classes
        .iter()
        .map(|class| {
            let d = PyDict::new(py);
            d.set_item("signature", class.signature.entries().to_vec())?;
            d.set_item("removal_cospectral", class.removal_cospectral)?;
            let members = class
                .members
                .iter()
                .map(|m| {
                    let member = PyDict::new(py);
                    member.set_item("graph_index", m.graph_index)?;
                    member.set_item("selection", m.spec.vertices().to_vec())?;
                    Ok(member.unbind())
                })
                .collect::<PyResult<Vec<_>>>()?;
            d.set_item("members", members)?;
            d.set_item(
                "vector",
                class
                    .vector
                    .components()
                    .iter()
                    .map(desc)
                    .collect::<Vec<_>>(),
            )?;
            Ok(d.unbind())
        })
        .collect()
}

/// One constructed path pair from a "k,m,d,a1:...:ap" parameter string:
/// (path order, first selection, second selection, verified).
#[pyfunction]
fn family_pair(params: &str) -> PyResult<(usize, Vec<usize>, Vec<usize>, bool)> {
    let params: PathFamilyParams = params.parse().map_err(err)?;
    let (s1, s2) = params.generate_pair();
    let verified = cmc_core::families::verify_pair(&s1, &s2).map_err(err)?;
    Ok((
        params.n(),
        s1.vertices().to_vec(),
        s2.vertices().to_vec(),
        verified,
    ))
}

/// All trees on n <= 7 vertices, one per isomorphism class.
#[pyfunction]
fn small_trees(n: usize) -> PyResult<Vec<Graph>> {
    Ok(gen::small_trees(n)
        .map_err(err)?
        .into_iter()
        .map(Graph::wrap)
        .collect())
}

/// All connected graphs on n <= 7 vertices, one per isomorphism class.
#[pyfunction]
fn small_connected_graphs(n: usize) -> PyResult<Vec<Graph>> {
    Ok(gen::small_connected_graphs(n)
        .map_err(err)?
        .into_iter()
        .map(Graph::wrap)
        .collect())
}

#[pymodule]
fn cmc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(hosoya_vector, m)?)?;
    m.add_function(wrap_pyfunction!(vectors_equal, m)?)?;
    m.add_function(wrap_pyfunction!(exists_removal_correspondence, m)?)?;
    m.add_function(wrap_pyfunction!(build_coalescence, m)?)?;
    m.add_function(wrap_pyfunction!(coalescence_charpoly, m)?)?;
    m.add_function(wrap_pyfunction!(find_matches, m)?)?;
    m.add_function(wrap_pyfunction!(family_pair, m)?)?;
    m.add_function(wrap_pyfunction!(small_trees, m)?)?;
    m.add_function(wrap_pyfunction!(small_connected_graphs, m)?)?;
    Ok(())
}
