//! The conflict graph: a complete weighted graph over the DAG's edges.
//!
//! With two cache words, consecutive edge deletions interact in exactly three
//! ways, and the transition cost depends only on which endpoints the two
//! edges share:
//!
//! | relation     | standard | fused |
//! |--------------|----------|-------|
//! | same target  | 1        | 1     |
//! | same source  | 2        | 1     |
//! | disjoint     | 3        | 2     |
//!
//! A pebbling strategy visits every edge once, so strategies correspond to
//! Hamiltonian paths over this graph and an optimal strategy to a minimum
//! one. Weights are computed on demand from the edge endpoints; the `m x m`
//! graph is never materialized.

use crate::dag::{Dag, NodeId};
use crate::error::{Error, Result};
use crate::game::{CostModel, Move, Strategy};

/// Index into the DAG's edge list; the vertices of the conflict graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The implicit complete weighted graph over a one-level bipartite DAG's
/// edges.
#[derive(Debug, Clone, Copy)]
pub struct ConflictGraph<'a> {
    dag: &'a Dag,
    model: CostModel,
}

impl<'a> ConflictGraph<'a> {
    pub fn new(dag: &'a Dag, model: CostModel) -> Result<ConflictGraph<'a>> {
        if !dag.is_one_level() {
            let witness = dag
                .edges()
                .iter()
                .find(|&&(u, v)| dag.in_degree(u) != 0 || dag.out_degree(v) != 0);
            let reason = match witness {
                Some(&(u, v)) => format!(
                    "edge '{}' -> '{}' does not run from a source to a sink",
                    dag.name(u),
                    dag.name(v)
                ),
                None => "graph is not one-level".to_owned(),
            };
            return Err(Error::NotBipartite { reason });
        }
        Ok(ConflictGraph { dag, model })
    }

    pub fn dag(&self) -> &'a Dag {
        self.dag
    }

    pub fn model(&self) -> CostModel {
        self.model
    }

    /// Number of conflict-graph vertices, i.e. DAG edges.
    pub fn vertex_count(&self) -> usize {
        self.dag.edge_count()
    }

    pub fn vertices(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.vertex_count() as u32).map(EdgeId)
    }

    /// Source and target of the DAG edge behind a conflict vertex.
    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.dag.edge(e.index())
    }

    /// Transition weight between two distinct edges.
    ///
    /// Panics if `a == b`: the conflict graph has no self-pairs.
    pub fn weight(&self, a: EdgeId, b: EdgeId) -> u64 {
        assert_ne!(a, b, "conflict weight of an edge with itself");
        let (sa, ta) = self.endpoints(a);
        let (sb, tb) = self.endpoints(b);
        match (sa == sb, ta == tb) {
            (_, true) => 1,
            (true, false) => match self.model {
                CostModel::Standard => 2,
                CostModel::Fused => 1,
            },
            (false, false) => match self.model {
                CostModel::Standard => 3,
                CostModel::Fused => 2,
            },
        }
    }

    /// Largest weight the model can assign; used by exports and the
    /// cycle-opening step.
    pub fn max_weight(&self) -> u64 {
        match self.model {
            CostModel::Standard => 3,
            CostModel::Fused => 2,
        }
    }

    /// Dense weight matrix; handy for the solvers, quadratic in `m`.
    pub fn weight_matrix(&self) -> Vec<Vec<u64>> {
        let m = self.vertex_count();
        let mut w = vec![vec![0u64; m]; m];
        for (i, row) in w.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if i != j {
                    *cell = self.weight(EdgeId(i as u32), EdgeId(j as u32));
                }
            }
        }
        w
    }

    /// JSON export for small fixtures: `{"m","model","weights":[[i,j,w]]}`.
    pub fn to_json(&self) -> String {
        let m = self.vertex_count();
        let mut weights = Vec::new();
        for i in 0..m {
            for j in (i + 1)..m {
                weights.push(serde_json::json!([
                    i,
                    j,
                    self.weight(EdgeId(i as u32), EdgeId(j as u32))
                ]));
            }
        }
        serde_json::json!({
            "m": m,
            "model": self.model.as_str(),
            "weights": weights,
        })
        .to_string()
    }

    /// DOT export with weight labels; maximum-weight pairs are dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph conflict {\n");
        for e in self.vertices() {
            let (u, v) = self.endpoints(e);
            out.push_str(&format!(
                "  e{} [label=\"({},{})\"];\n",
                e.0,
                self.dag.name(u),
                self.dag.name(v)
            ));
        }
        let m = self.vertex_count();
        for i in 0..m {
            for j in (i + 1)..m {
                let w = self.weight(EdgeId(i as u32), EdgeId(j as u32));
                let style = if w == self.max_weight() {
                    ", style=dashed"
                } else {
                    ""
                };
                out.push_str(&format!("  e{i} -- e{j} [label=\"{w}\"{style}];\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// An ordering of all conflict vertices with its cost under the graph's
/// weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamPath {
    order: Vec<EdgeId>,
    cost: u64,
}

impl HamPath {
    /// Validates that `order` is a permutation of all edges and prices it.
    pub fn new(cg: &ConflictGraph, order: Vec<EdgeId>) -> Result<HamPath> {
        let m = cg.vertex_count();
        let mut seen = vec![false; m];
        if order.len() != m {
            return Err(Error::NotAPermutation);
        }
        for e in &order {
            if e.index() >= m || seen[e.index()] {
                return Err(Error::NotAPermutation);
            }
            seen[e.index()] = true;
        }
        let cost = order.windows(2).map(|w| cg.weight(w[0], w[1])).sum();
        Ok(HamPath { order, cost })
    }

    pub fn order(&self) -> &[EdgeId] {
        &self.order
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }
}

/// The conflict graph plus a depot vertex joined to every edge-vertex with
/// weight 2, turning minimum Hamiltonian path into TSP: an optimal tour costs
/// exactly the optimal path plus 4.
#[derive(Debug, Clone, Copy)]
pub struct DepotGraph<'a> {
    base: ConflictGraph<'a>,
}

/// Weight of every depot edge.
pub const DEPOT_WEIGHT: u64 = 2;

impl<'a> DepotGraph<'a> {
    pub fn base(&self) -> &ConflictGraph<'a> {
        &self.base
    }

    pub fn vertex_count(&self) -> usize {
        self.base.vertex_count() + 1
    }

    /// Weight between an edge-vertex and the depot.
    pub fn depot_weight(&self, _e: EdgeId) -> u64 {
        DEPOT_WEIGHT
    }

    pub fn weight(&self, a: EdgeId, b: EdgeId) -> u64 {
        self.base.weight(a, b)
    }
}

/// Adds the depot vertex; the conflict graph must be non-empty.
pub fn augment_with_depot<'a>(cg: &ConflictGraph<'a>) -> Result<DepotGraph<'a>> {
    if cg.vertex_count() == 0 {
        return Err(Error::EmptyConflictGraph);
    }
    Ok(DepotGraph { base: *cg })
}

/// Emits the canonical strategy realizing a Hamiltonian path: load the first
/// edge's endpoints, then per transition the two/three/five-move sequence
/// matching its weight, then store the last result. Simulating it costs
/// exactly `path.cost() + 3` in either model.
pub fn path_to_strategy(cg: &ConflictGraph, path: &HamPath) -> Result<Strategy> {
    let order = path.order();
    if order.is_empty() {
        return Err(Error::EmptyConflictGraph);
    }
    let mut moves = Vec::new();
    let (first_src, first_tgt) = cg.endpoints(order[0]);
    moves.push(Move::PlaceRed(first_tgt));
    moves.push(Move::PlaceRed(first_src));
    for pair in order.windows(2) {
        let (v1, w1) = cg.endpoints(pair[0]);
        let (v2, w2) = cg.endpoints(pair[1]);
        if w1 == w2 {
            // Same target: drop the spent source, load the next one.
            moves.push(Move::RemoveRed(v1));
            moves.push(Move::PlaceRed(v2));
        } else if v1 == v2 {
            // Same source: write the finished result back, swap targets.
            match cg.model() {
                CostModel::Standard => {
                    moves.push(Move::BlueToRed(w1));
                    moves.push(Move::RemoveRed(w1));
                    moves.push(Move::PlaceRed(w2));
                }
                CostModel::Fused => {
                    moves.push(Move::FusedSwap {
                        store: w1,
                        load: w2,
                    });
                }
            }
        } else {
            // Disjoint: both words are replaced. The source is evicted before
            // anything is loaded so that no unrelated edge ever sees both of
            // its endpoints pebbled mid-transition.
            match cg.model() {
                CostModel::Standard => {
                    moves.push(Move::BlueToRed(w1));
                    moves.push(Move::RemoveRed(w1));
                    moves.push(Move::RemoveRed(v1));
                    moves.push(Move::PlaceRed(v2));
                    moves.push(Move::PlaceRed(w2));
                }
                CostModel::Fused => {
                    moves.push(Move::RemoveRed(v1));
                    moves.push(Move::FusedSwap {
                        store: w1,
                        load: v2,
                    });
                    moves.push(Move::PlaceRed(w2));
                }
            }
        }
    }
    let (_, last_tgt) = cg.endpoints(*order.last().expect("nonempty"));
    moves.push(Move::BlueToRed(last_tgt));
    Ok(Strategy::new(cg.model(), moves))
}

/// Recovers the edge-deletion order of a valid strategy as a Hamiltonian
/// path. Replays with capacity 2; inverse of [`path_to_strategy`] on
/// canonical strategies.
pub fn strategy_to_path(cg: &ConflictGraph, strategy: &Strategy) -> Result<HamPath> {
    if strategy.model != cg.model() {
        return Err(Error::ModelMismatch {
            strategy: strategy.model.as_str().to_owned(),
            graph: cg.model().as_str().to_owned(),
        });
    }
    let dag = cg.dag();
    let mut state = crate::game::GameState::initial(dag, 2);
    let mut order: Vec<EdgeId> = Vec::with_capacity(cg.vertex_count());
    for (index, &mv) in strategy.moves.iter().enumerate() {
        let (next, deleted) =
            state
                .apply_move_traced(dag, strategy.model, mv)
                .map_err(|e| match e {
                    Error::Rule(violation) => Error::RuleAt { index, violation },
                    other => other,
                })?;
        // At capacity 2 on a bipartite graph a closure can only ever fire
        // once, but guard the assumption anyway.
        if deleted.len() > 1 {
            return Err(Error::AmbiguousDeletion {
                count: deleted.len(),
            });
        }
        order.extend(deleted.into_iter().map(|e| EdgeId(e as u32)));
        state = next;
    }
    if !state.is_terminal() {
        return Err(Error::NonTerminal {
            remaining: state.remaining_edge_count(),
            dirty: state.blue_count(),
        });
    }
    HamPath::new(cg, order)
}
