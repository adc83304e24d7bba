//! Hamiltonian-path reduction gadgets, used as a built-in end-to-end
//! correctness harness.
//!
//! For an undirected graph on `n` vertices, each vertex becomes a fan-in-`n`
//! gadget (inputs `s_i0..s_i(n-1)`, output `t_i`), and inputs `s_ij`, `s_ji`
//! are merged into one shared source exactly when `(i, j)` is an edge. A
//! Hamiltonian path exists iff the gadget DAG can be pebbled with capacity 2
//! at cost at most `n^2 + n + 1`: a lone gadget costs `n + 2`, and a
//! follow-up gadget costs `n + 1` instead of `n + 2` exactly when it shares a
//! source with its predecessor.

use std::collections::BTreeMap;

use crate::conflict::ConflictGraph;
use crate::dag::{Dag, NodeId};
use crate::error::{Error, Result};
use crate::exact::held_karp_path;
use crate::game::CostModel;

/// Reduction instances are verified with Held-Karp on an `n^2`-vertex
/// conflict graph, so `n` stays tiny.
pub const VERIFY_MAX_NODES: usize = 4;

/// An undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    /// Edges are stored with endpoints ascending; self-loops and duplicates
    /// are rejected.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<SimpleGraph> {
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::BadParameters {
                    reason: format!("edge ({a}, {b}) outside 0..{n}"),
                });
            }
            if a == b {
                return Err(Error::SelfLoop {
                    node: a.to_string(),
                });
            }
            let pair = (a.min(b), a.max(b));
            if normalized.contains(&pair) {
                return Err(Error::DuplicateEdge {
                    src: pair.0.to_string(),
                    dst: pair.1.to_string(),
                });
            }
            normalized.push(pair);
        }
        normalized.sort_unstable();
        Ok(SimpleGraph {
            n,
            edges: normalized,
        })
    }

    pub fn empty(n: usize) -> SimpleGraph {
        SimpleGraph {
            n,
            edges: Vec::new(),
        }
    }

    pub fn complete(n: usize) -> SimpleGraph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                edges.push((a, b));
            }
        }
        SimpleGraph { n, edges }
    }

    pub fn path(n: usize) -> SimpleGraph {
        SimpleGraph {
            n,
            edges: (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        }
    }

    /// Decodes an edge subset from a bitmask over the pairs `(a, b)`, `a < b`,
    /// in lexicographic order.
    pub fn from_edge_mask(n: usize, mask: u64) -> SimpleGraph {
        let mut edges = Vec::new();
        let mut bit = 0;
        for a in 0..n {
            for b in (a + 1)..n {
                if mask & (1 << bit) != 0 {
                    edges.push((a, b));
                }
                bit += 1;
            }
        }
        SimpleGraph { n, edges }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let pair = (a.min(b), a.max(b));
        self.edges.binary_search(&pair).is_ok()
    }
}

/// Hamiltonian-path existence by backtracking over all vertex orders.
pub fn has_hamiltonian_path(g: &SimpleGraph) -> bool {
    let n = g.node_count();
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let mut visited = vec![false; n];
    for start in 0..n {
        visited[start] = true;
        if extend_path(g, start, 1, &mut visited) {
            return true;
        }
        visited[start] = false;
    }
    false
}

fn extend_path(g: &SimpleGraph, last: usize, placed: usize, visited: &mut Vec<bool>) -> bool {
    if placed == g.node_count() {
        return true;
    }
    for next in 0..g.node_count() {
        if visited[next] || !g.has_edge(last, next) {
            continue;
        }
        visited[next] = true;
        if extend_path(g, next, placed + 1, visited) {
            return true;
        }
        visited[next] = false;
    }
    false
}

/// A reduction instance: the source graph, the gadget DAG, and the cost
/// threshold separating yes- from no-instances.
#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub source: SimpleGraph,
    pub dag: Dag,
    /// `n^2 + n + 1`.
    pub threshold: u64,
    /// Merged source pairs `(i, j)` with `i < j`, one per source-graph edge.
    pub merges: Vec<(usize, usize)>,
    source_map: BTreeMap<(usize, usize), NodeId>,
    pub sinks: Vec<NodeId>,
}

impl GadgetInstance {
    /// The (possibly merged) source node carrying input `j` of gadget `i`.
    pub fn source_node(&self, i: usize, j: usize) -> NodeId {
        self.source_map[&(i, j)]
    }

    /// Sidecar JSON: `{"n","threshold","merges"}`.
    pub fn sidecar_json(&self) -> String {
        serde_json::json!({
            "n": self.source.node_count(),
            "threshold": self.threshold,
            "merges": self.merges,
        })
        .to_string()
    }
}

/// Builds the gadget DAG for a source graph with at least two vertices.
///
/// The diagonal input `s_ii` exists and is never merged. Merging collapses
/// sources, not edges: the DAG always has exactly `n^2` edges.
pub fn build_gadget_instance(g: &SimpleGraph) -> Result<GadgetInstance> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::BadParameters {
            reason: format!("gadget construction needs n >= 2, got {n}"),
        });
    }
    let mut pairs: Vec<(String, String)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let source = if g.has_edge(i, j) {
                format!("s{}_{}", i.min(j), i.max(j))
            } else {
                format!("s{i}_{j}")
            };
            pairs.push((source, format!("t{i}")));
        }
    }
    let dag = Dag::from_pairs(&pairs)?;

    let mut source_map = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let name = if g.has_edge(i, j) {
                format!("s{}_{}", i.min(j), i.max(j))
            } else {
                format!("s{i}_{j}")
            };
            source_map.insert((i, j), dag.node_by_name(&name).expect("source exists"));
        }
    }
    let sinks = (0..n)
        .map(|i| dag.node_by_name(&format!("t{i}")).expect("sink exists"))
        .collect();

    Ok(GadgetInstance {
        threshold: (n * n + n + 1) as u64,
        merges: g.edges().to_vec(),
        source: g.clone(),
        dag,
        source_map,
        sinks,
    })
}

/// Outcome of checking one reduction instance against the exact solver.
#[derive(Debug, Clone)]
pub struct ReductionCheck {
    pub has_ham_path: bool,
    pub opt: u64,
    pub threshold: u64,
    /// Hamiltonian path exists iff the optimum is within the threshold.
    pub consistent: bool,
}

/// Verifies the threshold equivalence on one instance: Hamiltonian-path
/// existence by enumeration on the source graph, the optimal pebbling cost by
/// Held-Karp on the gadget DAG.
pub fn verify_reduction(g: &SimpleGraph) -> Result<ReductionCheck> {
    let n = g.node_count();
    if n > VERIFY_MAX_NODES {
        return Err(Error::SizeGuard {
            what: "verify_reduction",
            actual: n,
            limit: VERIFY_MAX_NODES,
        });
    }
    let instance = build_gadget_instance(g)?;
    let cg = ConflictGraph::new(&instance.dag, CostModel::Standard)?;
    let opt = held_karp_path(&cg)?.cost() + 3;
    let has_ham_path = has_hamiltonian_path(g);
    Ok(ReductionCheck {
        has_ham_path,
        opt,
        threshold: instance.threshold,
        consistent: has_ham_path == (opt <= instance.threshold),
    })
}
