//! Christofides-style approximation on the conflict graph, plus the
//! level-by-level composition for multi-level DAGs.
//!
//! The pipeline: minimum spanning tree, minimum perfect matching on the
//! tree's odd-degree vertices, Euler tour of their union, shortcut to a
//! Hamiltonian cycle, open the cycle by dropping its heaviest edge. In the
//! {1,2,3} weight regime the result stays within 21/8 of the optimal path.

use serde::Serialize;

use crate::conflict::{ConflictGraph, EdgeId, HamPath};
use crate::dag::LeveledDag;
use crate::error::{Error, Result};
use crate::exact::held_karp_path;
use crate::game::{CostModel, GameState, Move, Strategy};

/// Exact matching is a subset DP, `2^|odd|` states.
pub const MATCHING_MAX_ODD: usize = 24;

/// A spanning tree over the conflict vertices.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    pub edges: Vec<(EdgeId, EdgeId)>,
    pub weight: u64,
}

impl SpanningTree {
    /// Vertices with odd degree, ascending. Always evenly many.
    pub fn odd_vertices(&self, m: usize) -> Vec<EdgeId> {
        let mut degree = vec![0usize; m];
        for &(a, b) in &self.edges {
            degree[a.index()] += 1;
            degree[b.index()] += 1;
        }
        (0..m)
            .filter(|&v| degree[v] % 2 == 1)
            .map(|v| EdgeId(v as u32))
            .collect()
    }
}

/// Minimum spanning tree by dense Prim growth, weights evaluated on demand.
pub fn mst(cg: &ConflictGraph) -> Result<SpanningTree> {
    let m = cg.vertex_count();
    if m == 0 {
        return Err(Error::EmptyConflictGraph);
    }
    let mut in_tree = vec![false; m];
    let mut key = vec![u64::MAX; m];
    let mut parent = vec![usize::MAX; m];
    key[0] = 0;
    let mut edges = Vec::with_capacity(m - 1);
    let mut weight = 0u64;
    for _ in 0..m {
        let u = (0..m)
            .filter(|&v| !in_tree[v])
            .min_by_key(|&v| (key[v], v))
            .expect("tree smaller than m");
        in_tree[u] = true;
        if parent[u] != usize::MAX {
            edges.push((EdgeId(parent[u] as u32), EdgeId(u as u32)));
            weight += key[u];
        }
        for v in 0..m {
            if in_tree[v] || v == u {
                continue;
            }
            let w = cg.weight(EdgeId(u as u32), EdgeId(v as u32));
            // `<=` keeps the most recently added vertex as parent on ties,
            // which turns uniform-weight graphs into the path 0-1-2-...
            if w <= key[v] {
                key[v] = w;
                parent[v] = u;
            }
        }
    }
    Ok(SpanningTree { edges, weight })
}

/// A perfect matching over a designated vertex subset.
#[derive(Debug, Clone)]
pub struct Matching {
    pub pairs: Vec<(EdgeId, EdgeId)>,
    pub weight: u64,
}

/// Exact minimum-weight perfect matching on `odd` by subset DP.
///
/// Exactness matters here: the approximation analysis charges the matching
/// against the optimum, which a heuristic matching would not support.
pub fn min_cost_perfect_matching(cg: &ConflictGraph, odd: &[EdgeId]) -> Result<Matching> {
    let k = odd.len();
    if !k.is_multiple_of(2) {
        return Err(Error::OddMatchingSet { count: k });
    }
    if k > MATCHING_MAX_ODD {
        return Err(Error::SizeGuard {
            what: "min_cost_perfect_matching",
            actual: k,
            limit: MATCHING_MAX_ODD,
        });
    }
    if k == 0 {
        return Ok(Matching {
            pairs: Vec::new(),
            weight: 0,
        });
    }

    let mut w = vec![vec![0u64; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                w[i][j] = cg.weight(odd[i], odd[j]);
            }
        }
    }

    let size = 1usize << k;
    let mut best = vec![u64::MAX; size];
    let mut choice = vec![usize::MAX; size];
    best[0] = 0;
    for mask in 1..size {
        if mask.count_ones() % 2 != 0 {
            continue;
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask ^ (1 << i);
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let prev = best[rest ^ (1 << j)];
            if prev == u64::MAX {
                continue;
            }
            let cand = prev + w[i][j];
            if cand < best[mask] {
                best[mask] = cand;
                choice[mask] = j;
            }
        }
    }

    let mut pairs = Vec::with_capacity(k / 2);
    let mut mask = size - 1;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let j = choice[mask];
        pairs.push((odd[i], odd[j]));
        mask ^= (1 << i) | (1 << j);
    }
    Ok(Matching {
        pairs,
        weight: best[size - 1],
    })
}

/// Multiset union of tree and matching edges: every vertex has even degree.
#[derive(Debug, Clone)]
pub struct EulerMultigraph {
    vertex_count: usize,
    edges: Vec<(EdgeId, EdgeId)>,
}

impl EulerMultigraph {
    pub fn new(vertex_count: usize, edges: Vec<(EdgeId, EdgeId)>) -> EulerMultigraph {
        EulerMultigraph {
            vertex_count,
            edges,
        }
    }

    pub fn merge(vertex_count: usize, tree: &SpanningTree, matching: &Matching) -> EulerMultigraph {
        let mut edges = tree.edges.clone();
        edges.extend_from_slice(&matching.pairs);
        EulerMultigraph {
            vertex_count,
            edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Closed walk through every multigraph edge exactly once (Hierholzer),
/// starting at vertex 0. Deterministic given the edge insertion order.
pub fn euler_tour(graph: &EulerMultigraph) -> Result<Vec<EdgeId>> {
    let n = graph.vertex_count;
    if n == 0 {
        return Err(Error::EmptyConflictGraph);
    }
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (idx, &(a, b)) in graph.edges.iter().enumerate() {
        adjacency[a.index()].push((b.index(), idx));
        adjacency[b.index()].push((a.index(), idx));
    }
    for (v, neighbors) in adjacency.iter().enumerate() {
        if !neighbors.len().is_multiple_of(2) {
            return Err(Error::OddDegree {
                vertex: v,
                degree: neighbors.len(),
            });
        }
    }
    if graph.edges.is_empty() {
        if n == 1 {
            return Ok(vec![EdgeId(0)]);
        }
        return Err(Error::Disconnected);
    }

    // Every vertex must be reachable from 0: the tour has to span them all.
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(to, _) in &adjacency[v] {
            if !seen[to] {
                seen[to] = true;
                stack.push(to);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Disconnected);
    }

    let mut used = vec![false; graph.edges.len()];
    let mut cursor = vec![0usize; n];
    let mut stack = vec![0usize];
    let mut walk = Vec::with_capacity(graph.edges.len() + 1);
    while let Some(&v) = stack.last() {
        let mut advanced = false;
        while cursor[v] < adjacency[v].len() {
            let (to, idx) = adjacency[v][cursor[v]];
            cursor[v] += 1;
            if used[idx] {
                continue;
            }
            used[idx] = true;
            stack.push(to);
            advanced = true;
            break;
        }
        if !advanced {
            walk.push(stack.pop().expect("nonempty stack"));
        }
    }
    walk.reverse();
    Ok(walk.into_iter().map(|v| EdgeId(v as u32)).collect())
}

/// All intermediate artifacts of one Christofides run.
#[derive(Debug, Clone)]
pub struct ChristofidesRun {
    pub tree: SpanningTree,
    pub matching: Matching,
    /// Weight of the Eulerian multigraph: tree plus matching.
    pub eulerian_weight: u64,
    /// The shortcut Hamiltonian cycle, starting at vertex 0.
    pub cycle: Vec<EdgeId>,
    pub cycle_cost: u64,
    pub path: HamPath,
}

/// Runs the full pipeline and keeps the intermediates for bound reporting.
pub fn christofides_detailed(cg: &ConflictGraph) -> Result<ChristofidesRun> {
    let m = cg.vertex_count();
    if m == 0 {
        return Err(Error::EmptyConflictGraph);
    }
    if m == 1 {
        let path = HamPath::new(cg, vec![EdgeId(0)])?;
        return Ok(ChristofidesRun {
            tree: SpanningTree {
                edges: Vec::new(),
                weight: 0,
            },
            matching: Matching {
                pairs: Vec::new(),
                weight: 0,
            },
            eulerian_weight: 0,
            cycle: vec![EdgeId(0)],
            cycle_cost: 0,
            path,
        });
    }

    let tree = mst(cg)?;
    let odd = tree.odd_vertices(m);
    let matching = min_cost_perfect_matching(cg, &odd)?;
    let multigraph = EulerMultigraph::merge(m, &tree, &matching);
    let walk = euler_tour(&multigraph)?;

    // Shortcut to first occurrences; the walk starts and ends at vertex 0,
    // so the result is a Hamiltonian cycle rooted there.
    let mut visited = vec![false; m];
    let mut cycle = Vec::with_capacity(m);
    for v in walk {
        if !visited[v.index()] {
            visited[v.index()] = true;
            cycle.push(v);
        }
    }
    debug_assert_eq!(cycle.len(), m);

    let mut cycle_cost = 0u64;
    let mut heaviest = (0usize, 0u64);
    for i in 0..m {
        let a = cycle[i];
        let b = cycle[(i + 1) % m];
        let w = cg.weight(a, b);
        cycle_cost += w;
        if w > heaviest.1 {
            heaviest = (i, w);
        }
    }

    // Open the cycle right after its heaviest edge; never worse than
    // dropping the closing edge.
    let cut = heaviest.0;
    let mut order = Vec::with_capacity(m);
    for i in 0..m {
        order.push(cycle[(cut + 1 + i) % m]);
    }
    let path = HamPath::new(cg, order)?;

    Ok(ChristofidesRun {
        eulerian_weight: tree.weight + matching.weight,
        tree,
        matching,
        cycle,
        cycle_cost,
        path,
    })
}

/// The Christofides-variant path.
pub fn christofides_path(cg: &ConflictGraph) -> Result<HamPath> {
    christofides_detailed(cg).map(|run| run.path)
}

/// Which path solver to run inside higher-level drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathSolver {
    HeldKarp,
    Christofides,
}

impl PathSolver {
    pub fn solve(self, cg: &ConflictGraph) -> Result<HamPath> {
        match self {
            PathSolver::HeldKarp => held_karp_path(cg),
            PathSolver::Christofides => christofides_path(cg),
        }
    }
}

/// A strategy for a leveled DAG assembled from per-level solutions.
#[derive(Debug, Clone)]
pub struct MultiLevelSolution {
    pub strategy: Strategy,
    pub total_cost: u64,
    /// Strategy cost contributed by each level (path cost + 3); empty levels
    /// contribute 0.
    pub level_costs: Vec<u64>,
}

/// Solves each bipartite level independently and concatenates the per-level
/// strategies. Every level ends fully stored, so after zero-cost eviction of
/// the leftover red pebbles the next level starts from a clean board.
pub fn multi_level_solve(
    leveled: &LeveledDag,
    model: CostModel,
    solver: PathSolver,
) -> Result<MultiLevelSolution> {
    let base = leveled.base();
    let mut moves: Vec<Move> = Vec::new();
    let mut level_costs = Vec::with_capacity(leveled.levels().len());
    let mut state = GameState::initial(base, 2);
    let mut first_done = false;
    for level in leveled.levels() {
        if level.dag().edge_count() == 0 {
            level_costs.push(0);
            continue;
        }
        if first_done {
            // Clear the two red pebbles the previous level left behind.
            for v in state.red_nodes() {
                moves.push(Move::RemoveRed(v));
                state = state.apply_move(base, model, Move::RemoveRed(v))?;
            }
        }
        let cg = ConflictGraph::new(level.dag(), model)?;
        let path = solver.solve(&cg)?;
        let local = crate::conflict::path_to_strategy(&cg, &path)?;
        level_costs.push(local.cost());
        for mv in local.moves {
            let mapped = map_move(mv, level);
            moves.push(mapped);
            state = state.apply_move(base, model, mapped)?;
        }
        first_done = true;
    }
    let total_cost = state.cost();
    debug_assert_eq!(total_cost, level_costs.iter().sum::<u64>());
    Ok(MultiLevelSolution {
        strategy: Strategy::new(model, moves),
        total_cost,
        level_costs,
    })
}

fn map_move(mv: Move, level: &crate::dag::Level) -> Move {
    match mv {
        Move::PlaceRed(v) => Move::PlaceRed(level.to_base(v)),
        Move::RemoveRed(v) => Move::RemoveRed(level.to_base(v)),
        Move::RedToBlue(v) => Move::RedToBlue(level.to_base(v)),
        Move::BlueToRed(v) => Move::BlueToRed(level.to_base(v)),
        Move::FusedSwap { store, load } => Move::FusedSwap {
            store: level.to_base(store),
            load: level.to_base(load),
        },
    }
}

/// Per-instance approximation report.
#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub m: usize,
    pub model: String,
    pub opt: u64,
    pub approx: u64,
    pub ratio: f64,
    pub bound: f64,
    pub within_bound: bool,
}

/// Guaranteed bound for the model's weight regime: 21/8 for {1,2,3}, a
/// conservative 2 for {1,2}.
pub fn ratio_bound(model: CostModel) -> f64 {
    match model {
        CostModel::Standard => 21.0 / 8.0,
        CostModel::Fused => 2.0,
    }
}

impl RatioReport {
    pub fn new(model: CostModel, m: usize, opt: u64, approx: u64) -> RatioReport {
        let ratio = if opt == 0 {
            if approx == 0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            approx as f64 / opt as f64
        };
        let bound = ratio_bound(model);
        RatioReport {
            m,
            model: model.as_str().to_owned(),
            opt,
            approx,
            ratio,
            bound,
            within_bound: ratio <= bound,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
