//! Exact solvers, used both as tools and as oracles for everything else:
//! Held-Karp over the conflict graph, brute-force tour and path enumeration,
//! and uniform-cost search over the full game state space for arbitrary
//! capacity.
//!
//! All size guards are hard errors so that runtimes stay bounded.

use std::collections::HashMap;

use crate::conflict::{ConflictGraph, DepotGraph, EdgeId, HamPath};
use crate::dag::Dag;
use crate::error::{Error, Result};
use crate::game::{legal_moves, CostModel, GameState, Move, PebbleColor, Strategy};

/// Held-Karp table is `2^m * m`; beyond this the memory is unreasonable.
pub const HELD_KARP_MAX_EDGES: usize = 20;
/// Factorial path enumeration bound.
pub const ENUM_PATH_MAX_EDGES: usize = 8;
/// Factorial tour enumeration bound (depot graphs).
pub const ENUM_TOUR_MAX_EDGES: usize = 9;
/// State-space search bounds.
pub const STATE_SPACE_MAX_NODES: usize = 12;
pub const STATE_SPACE_MAX_EDGES: usize = 12;

/// Minimum-cost Hamiltonian path over the conflict graph by dynamic
/// programming over (vertex subset, last vertex). Ties break toward the
/// smaller last vertex and then the smaller predecessor.
pub fn held_karp_path(cg: &ConflictGraph) -> Result<HamPath> {
    let m = cg.vertex_count();
    if m == 0 {
        return Err(Error::EmptyConflictGraph);
    }
    if m > HELD_KARP_MAX_EDGES {
        return Err(Error::SizeGuard {
            what: "held_karp_path",
            actual: m,
            limit: HELD_KARP_MAX_EDGES,
        });
    }
    if m == 1 {
        return HamPath::new(cg, vec![EdgeId(0)]);
    }

    let w = cg.weight_matrix();
    let size = 1usize << m;
    const UNSET: u32 = u32::MAX;
    let mut best = vec![UNSET; size * m];
    let mut parent = vec![u8::MAX; size * m];
    let at = |mask: usize, last: usize| mask * m + last;

    for e in 0..m {
        best[at(1 << e, e)] = 0;
    }
    for mask in 1..size {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut bits = mask;
        while bits != 0 {
            let last = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let prev_mask = mask ^ (1 << last);
            let mut cost = UNSET;
            let mut from = u8::MAX;
            let mut prevs = prev_mask;
            while prevs != 0 {
                let prev = prevs.trailing_zeros() as usize;
                prevs &= prevs - 1;
                let base = best[at(prev_mask, prev)];
                if base == UNSET {
                    continue;
                }
                let cand = base + w[prev][last] as u32;
                if cand < cost {
                    cost = cand;
                    from = prev as u8;
                }
            }
            best[at(mask, last)] = cost;
            parent[at(mask, last)] = from;
        }
    }

    let full = size - 1;
    let (mut last, mut total) = (0usize, UNSET);
    for e in 0..m {
        let c = best[at(full, e)];
        if c < total {
            total = c;
            last = e;
        }
    }
    debug_assert_ne!(total, UNSET);

    let mut order = Vec::with_capacity(m);
    let mut mask = full;
    let mut cur = last;
    loop {
        order.push(EdgeId(cur as u32));
        let p = parent[at(mask, cur)];
        if p == u8::MAX {
            break;
        }
        mask ^= 1 << cur;
        cur = p as usize;
    }
    order.reverse();
    HamPath::new(cg, order)
}

/// Reference oracle: minimum Hamiltonian path by enumerating all `m!`
/// orderings. Independent of [`held_karp_path`].
pub fn enumerate_min_path(cg: &ConflictGraph) -> Result<HamPath> {
    let m = cg.vertex_count();
    if m == 0 {
        return Err(Error::EmptyConflictGraph);
    }
    if m > ENUM_PATH_MAX_EDGES {
        return Err(Error::SizeGuard {
            what: "enumerate_min_path",
            actual: m,
            limit: ENUM_PATH_MAX_EDGES,
        });
    }
    let w = cg.weight_matrix();
    let mut order: Vec<usize> = (0..m).collect();
    let mut best_order = order.clone();
    let mut best = path_cost(&w, &order);
    permute(&mut order, 0, &mut |p| {
        let c = path_cost(&w, p);
        if c < best {
            best = c;
            copy_order(&mut best_order, p);
        }
    });
    HamPath::new(
        cg,
        best_order.into_iter().map(|e| EdgeId(e as u32)).collect(),
    )
}

fn copy_order(dst: &mut Vec<usize>, src: &[usize]) {
    dst.clear();
    dst.extend_from_slice(src);
}

/// Reference oracle: minimum Hamiltonian cycle cost by enumeration with the
/// first vertex pinned. For `m == 1` the cycle is empty and costs 0.
pub fn enumerate_min_cycle(cg: &ConflictGraph) -> Result<u64> {
    let m = cg.vertex_count();
    if m == 0 {
        return Err(Error::EmptyConflictGraph);
    }
    if m > ENUM_TOUR_MAX_EDGES {
        return Err(Error::SizeGuard {
            what: "enumerate_min_cycle",
            actual: m,
            limit: ENUM_TOUR_MAX_EDGES,
        });
    }
    if m == 1 {
        return Ok(0);
    }
    let w = cg.weight_matrix();
    let mut rest: Vec<usize> = (1..m).collect();
    let mut best = u64::MAX;
    permute(&mut rest, 0, &mut |p| {
        let mut c = w[0][p[0]];
        for pair in p.windows(2) {
            c += w[pair[0]][pair[1]];
        }
        c += w[p[p.len() - 1]][0];
        best = best.min(c);
    });
    Ok(best)
}

fn path_cost(w: &[Vec<u64>], order: &[usize]) -> u64 {
    order.windows(2).map(|p| w[p[0]][p[1]]).sum()
}

fn permute<F: FnMut(&[usize])>(items: &mut Vec<usize>, k: usize, visit: &mut F) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// A closed tour through the depot and every edge-vertex.
#[derive(Debug, Clone)]
pub struct Tour {
    /// Edge-vertices in visiting order; the depot sits before the first and
    /// after the last.
    pub order: Vec<EdgeId>,
    pub cost: u64,
}

/// Exact minimum TSP tour on a depot graph by full enumeration.
pub fn exhaustive_tour(dg: &DepotGraph) -> Result<Tour> {
    let m = dg.base().vertex_count();
    if m > ENUM_TOUR_MAX_EDGES {
        return Err(Error::SizeGuard {
            what: "exhaustive_tour",
            actual: m,
            limit: ENUM_TOUR_MAX_EDGES,
        });
    }
    let w = dg.base().weight_matrix();
    let mut order: Vec<usize> = (0..m).collect();
    let mut best_order = order.clone();
    let mut best = u64::MAX;
    permute(&mut order, 0, &mut |p| {
        let c = dg.depot_weight(EdgeId(p[0] as u32))
            + path_cost(&w, p)
            + dg.depot_weight(EdgeId(p[p.len() - 1] as u32));
        if c < best {
            best = c;
            copy_order(&mut best_order, p);
        }
    });
    Ok(Tour {
        order: best_order.into_iter().map(|e| EdgeId(e as u32)).collect(),
        cost: best,
    })
}

/// An optimal strategy together with its cost.
#[derive(Debug, Clone)]
pub struct Optimum {
    pub cost: u64,
    pub strategy: Strategy,
}

/// Optimal pebbling cost for any capacity by uniform-cost search over game
/// states. Works on arbitrary DAGs within the size guards, not just on
/// one-level ones.
///
/// Zero-cost closure happens inside successor generation; voluntary
/// red-to-blue recolorings are never emitted (a recoloring only forces an
/// extra paid store later, so dropping it cannot hurt).
pub fn state_space_opt(dag: &Dag, capacity: usize, model: CostModel) -> Result<Optimum> {
    if dag.node_count() > STATE_SPACE_MAX_NODES {
        return Err(Error::SizeGuard {
            what: "state_space_opt",
            actual: dag.node_count(),
            limit: STATE_SPACE_MAX_NODES,
        });
    }
    if dag.edge_count() > STATE_SPACE_MAX_EDGES {
        return Err(Error::SizeGuard {
            what: "state_space_opt",
            actual: dag.edge_count(),
            limit: STATE_SPACE_MAX_EDGES,
        });
    }
    if capacity == 0 {
        return Err(Error::BadParameters {
            reason: "capacity must be positive".into(),
        });
    }

    let start = GameState::initial(dag, capacity);
    let start_key = encode(&start, dag);
    let mut dist: HashMap<u64, u64> = HashMap::new();
    let mut parent: HashMap<u64, (u64, Move)> = HashMap::new();
    let mut buckets: Vec<Vec<u64>> = vec![vec![start_key]];
    dist.insert(start_key, 0);

    let mut cost = 0usize;
    while cost < buckets.len() {
        let mut i = 0;
        // The bucket may grow while being drained (zero-cost moves).
        while i < buckets[cost].len() {
            let key = buckets[cost][i];
            i += 1;
            if dist[&key] != cost as u64 {
                continue;
            }
            let state = decode(key, dag, capacity, cost as u64);
            if state.is_terminal() {
                return Ok(Optimum {
                    cost: cost as u64,
                    strategy: rebuild_strategy(model, start_key, key, &parent),
                });
            }
            for mv in legal_moves(&state, dag, model) {
                if matches!(mv, Move::RedToBlue(_)) {
                    continue;
                }
                let next = state
                    .apply_move(dag, model, mv)
                    .expect("legal move applies");
                let next_key = encode(&next, dag);
                let next_cost = cost as u64 + mv.cost();
                let better = match dist.get(&next_key) {
                    Some(&d) => next_cost < d,
                    None => true,
                };
                if better {
                    dist.insert(next_key, next_cost);
                    parent.insert(next_key, (key, mv));
                    while buckets.len() <= next_cost as usize {
                        buckets.push(Vec::new());
                    }
                    buckets[next_cost as usize].push(next_key);
                }
            }
        }
        cost += 1;
    }
    Err(Error::Unsolvable { capacity })
}

// State key: two bits per node (none/red/blue), one bit per remaining edge.
fn encode(state: &GameState, dag: &Dag) -> u64 {
    let mut key = 0u64;
    for v in dag.node_ids() {
        let code = match state.pebble(v) {
            None => 0u64,
            Some(PebbleColor::Red) => 1,
            Some(PebbleColor::Blue) => 2,
        };
        key |= code << (2 * v.index());
    }
    for e in 0..dag.edge_count() {
        if state.edge_remaining(e) {
            key |= 1 << (2 * STATE_SPACE_MAX_NODES + e);
        }
    }
    key
}

fn decode(key: u64, dag: &Dag, capacity: usize, cost: u64) -> GameState {
    let mut pebbles = Vec::with_capacity(dag.node_count());
    for v in dag.node_ids() {
        match (key >> (2 * v.index())) & 3 {
            0 => pebbles.push(None),
            1 => pebbles.push(Some(PebbleColor::Red)),
            2 => pebbles.push(Some(PebbleColor::Blue)),
            _ => unreachable!("invalid pebble code"),
        }
    }
    let mut remaining = Vec::with_capacity(dag.edge_count());
    for e in 0..dag.edge_count() {
        remaining.push(key & (1 << (2 * STATE_SPACE_MAX_NODES + e)) != 0);
    }
    GameState::from_parts(dag, capacity, pebbles, remaining, cost)
}

fn rebuild_strategy(
    model: CostModel,
    start_key: u64,
    terminal_key: u64,
    parent: &HashMap<u64, (u64, Move)>,
) -> Strategy {
    let mut moves = Vec::new();
    let mut key = terminal_key;
    while key != start_key {
        let (prev, mv) = parent[&key];
        moves.push(mv);
        key = prev;
    }
    moves.reverse();
    Strategy::new(model, moves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflict::path_to_strategy;
    use crate::game::simulate;

    fn star(n: usize) -> Dag {
        let names: Vec<String> = (0..n)
            .map(|i| format!("s{i}"))
            .chain(["t".into()])
            .collect();
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, n)).collect();
        Dag::new(names, edges).unwrap()
    }

    /// Two fan-in-`n` gadgets whose input sets overlap in exactly one node.
    fn two_gadgets_sharing_source(n: usize) -> Dag {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for i in 0..n - 1 {
            pairs.push((format!("a{i}"), "t1".into()));
        }
        pairs.push(("shared".into(), "t1".into()));
        pairs.push(("shared".into(), "t2".into()));
        for i in 0..n - 1 {
            pairs.push((format!("b{i}"), "t2".into()));
        }
        Dag::from_pairs(&pairs).unwrap()
    }

    #[test]
    fn star_path_cost() {
        let dag = star(4);
        let cg = ConflictGraph::new(&dag, CostModel::Standard).unwrap();
        let path = held_karp_path(&cg).unwrap();
        assert_eq!(path.cost(), 3);
    }

    #[test]
    fn shared_source_gadget_pair() {
        let n = 3;
        let dag = two_gadgets_sharing_source(n);
        assert_eq!(dag.edge_count(), 2 * n);
        let cg = ConflictGraph::new(&dag, CostModel::Standard).unwrap();
        let path = held_karp_path(&cg).unwrap();
        assert_eq!(path.cost(), 2 * n as u64);
        let strategy = path_to_strategy(&cg, &path).unwrap();
        assert_eq!(simulate(&dag, &strategy, 2).unwrap().cost, 2 * n as u64 + 3);
    }

    #[test]
    fn held_karp_guards() {
        let empty = Dag::new(Vec::new(), Vec::new()).unwrap();
        let cg = ConflictGraph::new(&empty, CostModel::Standard).unwrap();
        assert!(matches!(
            held_karp_path(&cg),
            Err(Error::EmptyConflictGraph)
        ));
    }

    #[test]
    fn exhaustive_tour_small_cases() {
        // m = 1: the tour costs 4.
        let dag = Dag::from_pairs(&[("s", "t")]).unwrap();
        let cg = ConflictGraph::new(&dag, CostModel::Fused).unwrap();
        let dg = crate::conflict::augment_with_depot(&cg).unwrap();
        assert_eq!(exhaustive_tour(&dg).unwrap().cost, 4);

        // m = 2 sharing a target: 1 + 4.
        let dag = Dag::from_pairs(&[("s1", "t"), ("s2", "t")]).unwrap();
        let cg = ConflictGraph::new(&dag, CostModel::Fused).unwrap();
        let dg = crate::conflict::augment_with_depot(&cg).unwrap();
        assert_eq!(exhaustive_tour(&dg).unwrap().cost, 5);
    }

    #[test]
    fn state_space_single_edge() {
        let dag = Dag::from_pairs(&[("s", "t")]).unwrap();
        let opt = state_space_opt(&dag, 2, CostModel::Standard).unwrap();
        assert_eq!(opt.cost, 3);
        assert_eq!(simulate(&dag, &opt.strategy, 2).unwrap().cost, 3);
    }

    #[test]
    fn state_space_star() {
        let dag = star(3);
        let opt = state_space_opt(&dag, 2, CostModel::Standard).unwrap();
        assert_eq!(opt.cost, 5);
    }

    #[test]
    fn state_space_matches_held_karp_on_matrix_example() {
        let dag = Dag::from_pairs(&[
            ("x1", "y1"),
            ("x2", "y1"),
            ("x3", "y1"),
            ("x3", "y2"),
            ("x4", "y2"),
        ])
        .unwrap();
        let cg = ConflictGraph::new(&dag, CostModel::Standard).unwrap();
        let hk = held_karp_path(&cg).unwrap();
        assert_eq!(hk.cost(), 5);
        let opt = state_space_opt(&dag, 2, CostModel::Standard).unwrap();
        assert_eq!(opt.cost, hk.cost() + 3);
    }

    #[test]
    fn state_space_unsolvable_at_capacity_one() {
        let dag = Dag::from_pairs(&[("s", "t")]).unwrap();
        assert!(matches!(
            state_space_opt(&dag, 1, CostModel::Standard),
            Err(Error::Unsolvable { capacity: 1 })
        ));
    }

    #[test]
    fn state_space_empty_graph() {
        let dag = Dag::new(Vec::new(), Vec::new()).unwrap();
        let opt = state_space_opt(&dag, 2, CostModel::Standard).unwrap();
        assert_eq!(opt.cost, 0);
        assert!(opt.strategy.moves.is_empty());
    }

    #[test]
    fn size_guards_fire() {
        let pairs: Vec<(String, String)> = (0..13)
            .map(|i| (format!("s{i}"), format!("t{i}")))
            .collect();
        let dag = Dag::from_pairs(&pairs).unwrap();
        assert!(matches!(
            state_space_opt(&dag, 2, CostModel::Standard),
            Err(Error::SizeGuard { .. })
        ));
    }
}
