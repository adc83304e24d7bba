//! The red-blue pebble game with partial computations.
//!
//! Rules, with their costs:
//!
//! - R1: a red pebble may be placed on a pebble-free vertex, cost 1 (LOAD);
//! - R2: a red pebble may be removed (REMOVE) or turned blue, cost 0;
//! - R3: a blue pebble may be turned red, cost 1 (STORE: the dirty value is
//!   written back and the cached copy is clean again);
//! - R4: whenever a leaf `u` and a vertex `v` with `(u, v)` still present both
//!   carry pebbles, the edge is deleted at no cost and `v`'s pebble turns
//!   blue, whatever its color was (COMPUTE). This closure fires
//!   automatically after every move;
//! - R5: at most `M` pebbles are on the graph at any time.
//!
//! A blue pebble marks a value that was modified in cache and not yet written
//! back; red marks a clean cached copy. A strategy is complete once every
//! edge is deleted and no blue pebble remains.
//!
//! The fused cost model adds one move: a store, an eviction, and a load
//! executed as a single unit-cost instruction.
//!
//! The voluntary red-to-blue half of R2 is legal and the simulator accepts
//! it, but it is never beneficial; the solvers do not emit it.

use crate::dag::{Dag, NodeId};
use crate::error::{Error, Result, RuleViolation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PebbleColor {
    Red,
    Blue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostModel {
    Standard,
    Fused,
}

impl CostModel {
    pub fn as_str(self) -> &'static str {
        match self {
            CostModel::Standard => "standard",
            CostModel::Fused => "fused",
        }
    }

    pub fn parse(text: &str) -> Result<CostModel> {
        match text {
            "standard" => Ok(CostModel::Standard),
            "fused" => Ok(CostModel::Fused),
            other => Err(Error::BadParameters {
                reason: format!("unknown cost model '{other}'"),
            }),
        }
    }
}

/// A single rule application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    PlaceRed(NodeId),
    RemoveRed(NodeId),
    RedToBlue(NodeId),
    BlueToRed(NodeId),
    FusedSwap { store: NodeId, load: NodeId },
}

impl Move {
    pub fn cost(self) -> u64 {
        match self {
            Move::PlaceRed(_) | Move::BlueToRed(_) | Move::FusedSwap { .. } => 1,
            Move::RemoveRed(_) | Move::RedToBlue(_) => 0,
        }
    }
}

/// An ordered move list under one cost model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub model: CostModel,
    pub moves: Vec<Move>,
}

impl Strategy {
    pub fn new(model: CostModel, moves: Vec<Move>) -> Strategy {
        Strategy { model, moves }
    }

    /// Sum of per-move costs; equals the simulated cost for valid strategies.
    pub fn cost(&self) -> u64 {
        self.moves.iter().map(|m| m.cost()).sum()
    }

    /// Rewrites a standard-model strategy for the fused model by merging each
    /// store/evict/reload triple into one fused move. Never increases cost.
    pub fn fuse(&self) -> Strategy {
        let mut moves = Vec::with_capacity(self.moves.len());
        let mut i = 0;
        while i < self.moves.len() {
            if i + 2 < self.moves.len() {
                if let (Move::BlueToRed(a), Move::RemoveRed(b), Move::PlaceRed(c)) =
                    (self.moves[i], self.moves[i + 1], self.moves[i + 2])
                {
                    if a == b && c != a {
                        moves.push(Move::FusedSwap { store: a, load: c });
                        i += 3;
                        continue;
                    }
                }
            }
            moves.push(self.moves[i]);
            i += 1;
        }
        Strategy {
            model: CostModel::Fused,
            moves,
        }
    }
}

/// Machine instruction mirror of the pebble moves; fused moves expand to
/// their store/remove/load halves, voluntary red-to-blue recolorings emit
/// nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instruction {
    Load(NodeId),
    Remove(NodeId),
    Store(NodeId),
    Compute { src: NodeId, dst: NodeId },
}

#[derive(Debug, Clone, Default)]
pub struct InstructionTrace {
    pub instructions: Vec<Instruction>,
}

/// One configuration of the game: pebble placement, remaining edges, capacity
/// and the cost accumulated so far. Values are immutable; applying a move
/// returns a fresh state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pebbles: Vec<Option<PebbleColor>>,
    pebble_count: usize,
    remaining: Vec<bool>,
    remaining_edges: usize,
    in_degree: Vec<u32>,
    capacity: usize,
    cost: u64,
}

impl GameState {
    /// The empty board: no pebbles, every edge present.
    pub fn initial(dag: &Dag, capacity: usize) -> GameState {
        assert!(capacity >= 1, "capacity must be positive");
        let n = dag.node_count();
        let mut in_degree = vec![0u32; n];
        for &(_, v) in dag.edges() {
            in_degree[v.index()] += 1;
        }
        GameState {
            pebbles: vec![None; n],
            pebble_count: 0,
            remaining: vec![true; dag.edge_count()],
            remaining_edges: dag.edge_count(),
            in_degree,
            capacity,
            cost: 0,
        }
    }

    /// Reassembles a state from an explicit pebble placement and remaining
    /// edge set; the state-space solver uses this to decode packed search
    /// keys.
    pub(crate) fn from_parts(
        dag: &Dag,
        capacity: usize,
        pebbles: Vec<Option<PebbleColor>>,
        remaining: Vec<bool>,
        cost: u64,
    ) -> GameState {
        debug_assert_eq!(pebbles.len(), dag.node_count());
        debug_assert_eq!(remaining.len(), dag.edge_count());
        let pebble_count = pebbles.iter().filter(|p| p.is_some()).count();
        let remaining_edges = remaining.iter().filter(|r| **r).count();
        let mut in_degree = vec![0u32; dag.node_count()];
        for (e, &(_, v)) in dag.edges().iter().enumerate() {
            if remaining[e] {
                in_degree[v.index()] += 1;
            }
        }
        GameState {
            pebbles,
            pebble_count,
            remaining,
            remaining_edges,
            in_degree,
            capacity,
            cost,
        }
    }

    pub fn pebble(&self, v: NodeId) -> Option<PebbleColor> {
        self.pebbles[v.index()]
    }

    pub fn pebble_count(&self) -> usize {
        self.pebble_count
    }

    pub fn blue_count(&self) -> usize {
        self.pebbles
            .iter()
            .filter(|p| **p == Some(PebbleColor::Blue))
            .count()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn edge_remaining(&self, edge: usize) -> bool {
        self.remaining[edge]
    }

    pub fn remaining_edge_count(&self) -> usize {
        self.remaining_edges
    }

    /// True once every edge is deleted and every result has been stored.
    pub fn is_terminal(&self) -> bool {
        self.remaining_edges == 0 && self.blue_count() == 0
    }

    /// Nodes currently carrying a red pebble, ascending.
    pub fn red_nodes(&self) -> Vec<NodeId> {
        self.pebbles
            .iter()
            .enumerate()
            .filter(|(_, p)| **p == Some(PebbleColor::Red))
            .map(|(i, _)| NodeId(i as u32))
            .collect()
    }

    fn check_node(&self, v: NodeId) -> std::result::Result<(), RuleViolation> {
        if v.index() >= self.pebbles.len() {
            return Err(RuleViolation::UnknownNode { index: v.index() });
        }
        Ok(())
    }

    /// Checks the move's precondition without applying it.
    pub fn check_move(
        &self,
        dag: &Dag,
        model: CostModel,
        mv: Move,
    ) -> std::result::Result<(), RuleViolation> {
        match mv {
            Move::PlaceRed(v) => {
                self.check_node(v)?;
                if self.pebbles[v.index()].is_some() {
                    return Err(RuleViolation::Occupied {
                        node: dag.name(v).to_owned(),
                    });
                }
                if self.pebble_count >= self.capacity {
                    return Err(RuleViolation::CapacityReached {
                        capacity: self.capacity,
                    });
                }
            }
            Move::RemoveRed(v) | Move::RedToBlue(v) => {
                self.check_node(v)?;
                if self.pebbles[v.index()] != Some(PebbleColor::Red) {
                    return Err(RuleViolation::NotRed {
                        node: dag.name(v).to_owned(),
                    });
                }
            }
            Move::BlueToRed(v) => {
                self.check_node(v)?;
                if self.pebbles[v.index()] != Some(PebbleColor::Blue) {
                    return Err(RuleViolation::NotBlue {
                        node: dag.name(v).to_owned(),
                    });
                }
            }
            Move::FusedSwap { store, load } => {
                if model != CostModel::Fused {
                    return Err(RuleViolation::FusedUnavailable);
                }
                self.check_node(store)?;
                self.check_node(load)?;
                if self.pebbles[store.index()] != Some(PebbleColor::Blue) {
                    return Err(RuleViolation::NotBlue {
                        node: dag.name(store).to_owned(),
                    });
                }
                if self.pebbles[load.index()].is_some() {
                    return Err(RuleViolation::Occupied {
                        node: dag.name(load).to_owned(),
                    });
                }
                // Capacity is unaffected: one pebble leaves as one enters.
            }
        }
        Ok(())
    }

    /// Applies one move and the automatic R4 closure; returns the successor
    /// state.
    pub fn apply_move(&self, dag: &Dag, model: CostModel, mv: Move) -> Result<GameState> {
        self.apply_move_traced(dag, model, mv).map(|(s, _)| s)
    }

    /// Like [`GameState::apply_move`], additionally reporting the edges the
    /// closure deleted, in firing order.
    pub fn apply_move_traced(
        &self,
        dag: &Dag,
        model: CostModel,
        mv: Move,
    ) -> Result<(GameState, Vec<usize>)> {
        self.check_move(dag, model, mv).map_err(Error::Rule)?;
        let mut next = self.clone();
        match mv {
            Move::PlaceRed(v) => {
                next.pebbles[v.index()] = Some(PebbleColor::Red);
                next.pebble_count += 1;
            }
            Move::RemoveRed(v) => {
                next.pebbles[v.index()] = None;
                next.pebble_count -= 1;
            }
            Move::RedToBlue(v) => {
                next.pebbles[v.index()] = Some(PebbleColor::Blue);
            }
            Move::BlueToRed(v) => {
                next.pebbles[v.index()] = Some(PebbleColor::Red);
            }
            Move::FusedSwap { store, load } => {
                next.pebbles[store.index()] = None;
                next.pebbles[load.index()] = Some(PebbleColor::Red);
            }
        }
        next.cost += mv.cost();
        let deleted = next.closure_mut(dag);
        Ok((next, deleted))
    }

    /// Runs rule R4 to its fixed point and returns the resulting state.
    ///
    /// The fixed point does not depend on firing order: deletions only ever
    /// enable further deletions.
    pub fn closure_r4(&self, dag: &Dag) -> GameState {
        let mut next = self.clone();
        next.closure_mut(dag);
        next
    }

    fn closure_mut(&mut self, dag: &Dag) -> Vec<usize> {
        let mut deleted = Vec::new();
        loop {
            let mut fired = false;
            for (e, &(u, v)) in dag.edges().iter().enumerate() {
                if !self.remaining[e] {
                    continue;
                }
                if self.in_degree[u.index()] == 0
                    && self.pebbles[u.index()].is_some()
                    && self.pebbles[v.index()].is_some()
                {
                    self.remaining[e] = false;
                    self.remaining_edges -= 1;
                    self.in_degree[v.index()] -= 1;
                    self.pebbles[v.index()] = Some(PebbleColor::Blue);
                    deleted.push(e);
                    fired = true;
                }
            }
            if !fired {
                return deleted;
            }
        }
    }
}

/// Enumerates every move whose precondition holds, in a fixed order: places,
/// removals, recolorings, stores, then fused swaps. The never-beneficial
/// red-to-blue moves are included because rule R2 allows them.
pub fn legal_moves(state: &GameState, dag: &Dag, model: CostModel) -> Vec<Move> {
    let mut moves = Vec::new();
    let push_if_legal = |mv: Move, moves: &mut Vec<Move>| {
        if state.check_move(dag, model, mv).is_ok() {
            moves.push(mv);
        }
    };
    for v in dag.node_ids() {
        push_if_legal(Move::PlaceRed(v), &mut moves);
    }
    for v in dag.node_ids() {
        push_if_legal(Move::RemoveRed(v), &mut moves);
    }
    for v in dag.node_ids() {
        push_if_legal(Move::RedToBlue(v), &mut moves);
    }
    for v in dag.node_ids() {
        push_if_legal(Move::BlueToRed(v), &mut moves);
    }
    if model == CostModel::Fused {
        for store in dag.node_ids() {
            if state.pebble(store) != Some(PebbleColor::Blue) {
                continue;
            }
            for load in dag.node_ids() {
                push_if_legal(Move::FusedSwap { store, load }, &mut moves);
            }
        }
    }
    moves
}

#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub cost: u64,
    pub trace: InstructionTrace,
    pub final_state: GameState,
}

/// Replays a strategy from the empty board. Succeeds only if every move is
/// legal and the final state is terminal (no edges left, no blue pebbles).
pub fn simulate(dag: &Dag, strategy: &Strategy, capacity: usize) -> Result<SimulationReport> {
    let mut state = GameState::initial(dag, capacity);
    let mut trace = InstructionTrace::default();
    for (index, &mv) in strategy.moves.iter().enumerate() {
        let (next, deleted) =
            state
                .apply_move_traced(dag, strategy.model, mv)
                .map_err(|e| match e {
                    Error::Rule(violation) => Error::RuleAt { index, violation },
                    other => other,
                })?;
        match mv {
            Move::PlaceRed(v) => trace.instructions.push(Instruction::Load(v)),
            Move::RemoveRed(v) => trace.instructions.push(Instruction::Remove(v)),
            Move::RedToBlue(_) => {}
            Move::BlueToRed(v) => trace.instructions.push(Instruction::Store(v)),
            Move::FusedSwap { store, load } => {
                trace.instructions.push(Instruction::Store(store));
                trace.instructions.push(Instruction::Remove(store));
                trace.instructions.push(Instruction::Load(load));
            }
        }
        for e in deleted {
            let (src, dst) = dag.edge(e);
            trace.instructions.push(Instruction::Compute { src, dst });
        }
        state = next;
    }
    if !state.is_terminal() {
        return Err(Error::NonTerminal {
            remaining: state.remaining_edge_count(),
            dirty: state.blue_count(),
        });
    }
    Ok(SimulationReport {
        cost: state.cost(),
        trace,
        final_state: state,
    })
}

/// Serializes a strategy as
/// `{"model":"standard","moves":[{"op":"place","v":"x1"},...]}` with nodes
/// referenced by name.
pub fn strategy_to_json(dag: &Dag, strategy: &Strategy) -> String {
    let moves: Vec<serde_json::Value> = strategy
        .moves
        .iter()
        .map(|mv| match *mv {
            Move::PlaceRed(v) => serde_json::json!({"op": "place", "v": dag.name(v)}),
            Move::RemoveRed(v) => serde_json::json!({"op": "remove", "v": dag.name(v)}),
            Move::RedToBlue(v) => serde_json::json!({"op": "to_blue", "v": dag.name(v)}),
            Move::BlueToRed(v) => serde_json::json!({"op": "store", "v": dag.name(v)}),
            Move::FusedSwap { store, load } => {
                serde_json::json!({"op": "fused", "v": dag.name(store), "w": dag.name(load)})
            }
        })
        .collect();
    serde_json::json!({
        "model": strategy.model.as_str(),
        "moves": moves,
    })
    .to_string()
}

pub fn strategy_from_json(dag: &Dag, text: &str) -> Result<Strategy> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let model = CostModel::parse(value["model"].as_str().unwrap_or_default())?;
    let raw_moves = value["moves"].as_array().ok_or(Error::BadParameters {
        reason: "strategy json: 'moves' must be an array".into(),
    })?;
    let node = |m: &serde_json::Value, key: &str| -> Result<NodeId> {
        let name = m[key].as_str().ok_or(Error::BadParameters {
            reason: format!("strategy json: move is missing '{key}'"),
        })?;
        dag.node_by_name(name).ok_or(Error::BadParameters {
            reason: format!("strategy json: unknown node '{name}'"),
        })
    };
    let mut moves = Vec::with_capacity(raw_moves.len());
    for m in raw_moves {
        let op = m["op"].as_str().unwrap_or_default();
        let mv = match op {
            "place" => Move::PlaceRed(node(m, "v")?),
            "remove" => Move::RemoveRed(node(m, "v")?),
            "to_blue" => Move::RedToBlue(node(m, "v")?),
            "store" => Move::BlueToRed(node(m, "v")?),
            "fused" => Move::FusedSwap {
                store: node(m, "v")?,
                load: node(m, "w")?,
            },
            other => {
                return Err(Error::BadParameters {
                    reason: format!("strategy json: unknown op '{other}'"),
                })
            }
        };
        moves.push(mv);
    }
    Ok(Strategy { model, moves })
}

/// Serializes an instruction trace as `[{"op":"load","node":"x1"},...]`.
pub fn trace_to_json(dag: &Dag, trace: &InstructionTrace) -> String {
    let items: Vec<serde_json::Value> = trace
        .instructions
        .iter()
        .map(|ins| match *ins {
            Instruction::Load(v) => serde_json::json!({"op": "load", "node": dag.name(v)}),
            Instruction::Remove(v) => serde_json::json!({"op": "remove", "node": dag.name(v)}),
            Instruction::Store(v) => serde_json::json!({"op": "store", "node": dag.name(v)}),
            Instruction::Compute { src, dst } => {
                serde_json::json!({"op": "compute", "src": dag.name(src), "dst": dag.name(dst)})
            }
        })
        .collect();
    serde_json::Value::Array(items).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::Dag;

    fn single_edge() -> Dag {
        Dag::from_pairs(&[("s", "t")]).unwrap()
    }

    fn star(n: usize) -> Dag {
        let names: Vec<String> = (0..n)
            .map(|i| format!("s{i}"))
            .chain(["t".into()])
            .collect();
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, n)).collect();
        Dag::new(names, edges).unwrap()
    }

    #[test]
    fn place_red_costs_one() {
        let g = single_edge();
        let t = g.node_by_name("t").unwrap();
        let s0 = GameState::initial(&g, 2);
        let s1 = s0
            .apply_move(&g, CostModel::Standard, Move::PlaceRed(t))
            .unwrap();
        assert_eq!(s1.cost(), 1);
        assert_eq!(s1.pebble(t), Some(PebbleColor::Red));
        assert_eq!(s1.remaining_edge_count(), 1);
    }

    #[test]
    fn r4_fires_after_second_placement() {
        let g = single_edge();
        let s = g.node_by_name("s").unwrap();
        let t = g.node_by_name("t").unwrap();
        let state = GameState::initial(&g, 2)
            .apply_move(&g, CostModel::Standard, Move::PlaceRed(t))
            .unwrap();
        let (state, deleted) = state
            .apply_move_traced(&g, CostModel::Standard, Move::PlaceRed(s))
            .unwrap();
        assert_eq!(deleted, vec![0]);
        assert_eq!(state.pebble(t), Some(PebbleColor::Blue));
        assert_eq!(state.pebble(s), Some(PebbleColor::Red));
        assert_eq!(state.remaining_edge_count(), 0);
    }

    #[test]
    fn capacity_is_enforced() {
        let g = star(2);
        let mut state = GameState::initial(&g, 2);
        for v in [g.node_by_name("s0").unwrap(), g.node_by_name("s1").unwrap()] {
            state = state
                .apply_move(&g, CostModel::Standard, Move::PlaceRed(v))
                .unwrap();
        }
        let t = g.node_by_name("t").unwrap();
        let err = state
            .apply_move(&g, CostModel::Standard, Move::PlaceRed(t))
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Rule(RuleViolation::CapacityReached { capacity: 2 })
        ));
    }

    #[test]
    fn closure_is_a_fixed_point_and_cascades() {
        // M=3: pebbles on s0, s1, t; both edges fire in one closure.
        let g = star(2);
        let t = g.node_by_name("t").unwrap();
        let mut state = GameState::initial(&g, 3);
        for name in ["t", "s0", "s1"] {
            let v = g.node_by_name(name).unwrap();
            state = state
                .apply_move(&g, CostModel::Standard, Move::PlaceRed(v))
                .unwrap();
        }
        assert_eq!(state.remaining_edge_count(), 0);
        assert_eq!(state.pebble(t), Some(PebbleColor::Blue));
        // Already closed: closure_r4 is the identity here.
        let again = state.closure_r4(&g);
        assert_eq!(again, state);
    }

    #[test]
    fn internal_source_does_not_fire() {
        // u has a remaining in-edge, so (u, v) must not fire even with both
        // endpoints pebbled.
        let g = Dag::from_pairs(&[("a", "u"), ("u", "v")]).unwrap();
        let u = g.node_by_name("u").unwrap();
        let v = g.node_by_name("v").unwrap();
        let mut state = GameState::initial(&g, 2);
        for node in [u, v] {
            state = state
                .apply_move(&g, CostModel::Standard, Move::PlaceRed(node))
                .unwrap();
        }
        assert_eq!(state.remaining_edge_count(), 2);
        assert_eq!(state.pebble(v), Some(PebbleColor::Red));
    }

    #[test]
    fn worked_summation_example() {
        // y1 <- y1 + x1 + x2 with M = 2 costs 4: three loads and one store.
        let g = Dag::from_pairs(&[("x1", "y1"), ("x2", "y1")]).unwrap();
        let x1 = g.node_by_name("x1").unwrap();
        let x2 = g.node_by_name("x2").unwrap();
        let y1 = g.node_by_name("y1").unwrap();
        let strategy = Strategy::new(
            CostModel::Standard,
            vec![
                Move::PlaceRed(y1),
                Move::PlaceRed(x1),
                Move::RemoveRed(x1),
                Move::PlaceRed(x2),
                Move::BlueToRed(y1),
            ],
        );
        let report = simulate(&g, &strategy, 2).unwrap();
        assert_eq!(report.cost, 4);
        let expected = vec![
            Instruction::Load(y1),
            Instruction::Load(x1),
            Instruction::Compute { src: x1, dst: y1 },
            Instruction::Remove(x1),
            Instruction::Load(x2),
            Instruction::Compute { src: x2, dst: y1 },
            Instruction::Store(y1),
        ];
        assert_eq!(report.trace.instructions, expected);
    }

    #[test]
    fn single_edge_strategy_costs_three() {
        let g = single_edge();
        let s = g.node_by_name("s").unwrap();
        let t = g.node_by_name("t").unwrap();
        let strategy = Strategy::new(
            CostModel::Standard,
            vec![Move::PlaceRed(t), Move::PlaceRed(s), Move::BlueToRed(t)],
        );
        let report = simulate(&g, &strategy, 2).unwrap();
        assert_eq!(report.cost, 3);
    }

    #[test]
    fn star_strategy_costs_n_plus_two() {
        for n in 2..=6 {
            let g = star(n);
            let t = g.node_by_name("t").unwrap();
            let mut moves = vec![Move::PlaceRed(t)];
            for i in 0..n {
                let s = g.node_by_name(&format!("s{i}")).unwrap();
                moves.push(Move::PlaceRed(s));
                if i + 1 < n {
                    moves.push(Move::RemoveRed(s));
                }
            }
            moves.push(Move::BlueToRed(t));
            let report = simulate(&g, &Strategy::new(CostModel::Standard, moves), 2).unwrap();
            assert_eq!(report.cost, n as u64 + 2);
        }
    }

    #[test]
    fn non_terminal_strategies_rejected() {
        let g = single_edge();
        let s = g.node_by_name("s").unwrap();
        let t = g.node_by_name("t").unwrap();
        // Edge deleted but result never stored.
        let unstored = Strategy::new(
            CostModel::Standard,
            vec![Move::PlaceRed(t), Move::PlaceRed(s)],
        );
        assert!(matches!(
            simulate(&g, &unstored, 2).unwrap_err(),
            Error::NonTerminal {
                remaining: 0,
                dirty: 1
            }
        ));
        // Nothing done at all.
        let empty = Strategy::new(CostModel::Standard, Vec::new());
        assert!(matches!(
            simulate(&g, &empty, 2).unwrap_err(),
            Error::NonTerminal {
                remaining: 1,
                dirty: 0
            }
        ));
    }

    #[test]
    fn illegal_move_reports_index() {
        let g = single_edge();
        let s = g.node_by_name("s").unwrap();
        let strategy = Strategy::new(
            CostModel::Standard,
            vec![Move::PlaceRed(s), Move::PlaceRed(s)],
        );
        match simulate(&g, &strategy, 2).unwrap_err() {
            Error::RuleAt { index, violation } => {
                assert_eq!(index, 1);
                assert!(matches!(violation, RuleViolation::Occupied { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fused_swap_only_in_fused_model() {
        let g = single_edge();
        let s = g.node_by_name("s").unwrap();
        let t = g.node_by_name("t").unwrap();
        let state = GameState::initial(&g, 2)
            .apply_move(&g, CostModel::Standard, Move::PlaceRed(t))
            .unwrap()
            .apply_move(&g, CostModel::Standard, Move::PlaceRed(s))
            .unwrap();
        // t is now blue.
        let swap = Move::FusedSwap { store: t, load: s };
        assert!(matches!(
            state.apply_move(&g, CostModel::Standard, swap).unwrap_err(),
            Error::Rule(RuleViolation::FusedUnavailable)
        ));
        // In the fused model the load target must be free; s is occupied.
        assert!(state.apply_move(&g, CostModel::Fused, swap).is_err());
    }

    #[test]
    fn fused_swap_at_full_capacity() {
        let g = star(2);
        let t = g.node_by_name("t").unwrap();
        let s0 = g.node_by_name("s0").unwrap();
        let s1 = g.node_by_name("s1").unwrap();
        let state = GameState::initial(&g, 2)
            .apply_move(&g, CostModel::Fused, Move::PlaceRed(t))
            .unwrap()
            .apply_move(&g, CostModel::Fused, Move::PlaceRed(s0))
            .unwrap();
        // Board is full (t blue, s0 red); the swap still goes through.
        let state = state
            .apply_move(&g, CostModel::Fused, Move::FusedSwap { store: t, load: s1 })
            .unwrap();
        assert_eq!(state.pebble(t), None);
        assert_eq!(state.pebble(s1), Some(PebbleColor::Red));
        assert_eq!(state.pebble_count(), 2);
    }

    #[test]
    fn legal_move_enumeration() {
        let g = star(2);
        let empty = GameState::initial(&g, 2);
        let moves = legal_moves(&empty, &g, CostModel::Standard);
        assert_eq!(moves.len(), g.node_count()); // a placement per vertex

        // Fill the board with red pebbles on the two sources.
        let s0 = g.node_by_name("s0").unwrap();
        let s1 = g.node_by_name("s1").unwrap();
        let full = empty
            .apply_move(&g, CostModel::Standard, Move::PlaceRed(s0))
            .unwrap()
            .apply_move(&g, CostModel::Standard, Move::PlaceRed(s1))
            .unwrap();
        let moves = legal_moves(&full, &g, CostModel::Standard);
        assert!(moves.iter().all(|m| !matches!(m, Move::PlaceRed(_))));
        assert_eq!(
            moves
                .iter()
                .filter(|m| matches!(m, Move::RemoveRed(_)))
                .count(),
            2
        );
        assert_eq!(
            moves
                .iter()
                .filter(|m| matches!(m, Move::RedToBlue(_)))
                .count(),
            2
        );
    }

    #[test]
    fn fused_legal_moves_include_swaps() {
        let g = star(2);
        let t = g.node_by_name("t").unwrap();
        let s0 = g.node_by_name("s0").unwrap();
        let state = GameState::initial(&g, 2)
            .apply_move(&g, CostModel::Fused, Move::PlaceRed(t))
            .unwrap()
            .apply_move(&g, CostModel::Fused, Move::PlaceRed(s0))
            .unwrap();
        let moves = legal_moves(&state, &g, CostModel::Fused);
        assert!(moves.iter().any(|m| matches!(m, Move::FusedSwap { .. })));
    }

    #[test]
    fn strategy_json_round_trip() {
        let g = star(2);
        let t = g.node_by_name("t").unwrap();
        let s0 = g.node_by_name("s0").unwrap();
        let s1 = g.node_by_name("s1").unwrap();
        let strategy = Strategy::new(
            CostModel::Fused,
            vec![
                Move::PlaceRed(t),
                Move::PlaceRed(s0),
                Move::FusedSwap { store: t, load: s1 },
                Move::RemoveRed(s0),
                Move::RedToBlue(s1),
                Move::BlueToRed(s1),
            ],
        );
        let json = strategy_to_json(&g, &strategy);
        let back = strategy_from_json(&g, &json).unwrap();
        assert_eq!(back, strategy);
    }

    #[test]
    fn fuse_merges_store_evict_load() {
        // Two sinks fed by one source: the standard same-source transition
        // store/evict/reload collapses into one fused move.
        let g = Dag::from_pairs(&[("b", "t1"), ("b", "t2")]).unwrap();
        let b = g.node_by_name("b").unwrap();
        let t1 = g.node_by_name("t1").unwrap();
        let t2 = g.node_by_name("t2").unwrap();
        let standard = Strategy::new(
            CostModel::Standard,
            vec![
                Move::PlaceRed(t1),
                Move::PlaceRed(b),
                Move::BlueToRed(t1),
                Move::RemoveRed(t1),
                Move::PlaceRed(t2),
                Move::BlueToRed(t2),
            ],
        );
        let std_cost = simulate(&g, &standard, 2).unwrap().cost;
        assert_eq!(std_cost, 5);
        let fused = standard.fuse();
        assert_eq!(
            fused.moves[2],
            Move::FusedSwap {
                store: t1,
                load: t2
            }
        );
        let fused_cost = simulate(&g, &fused, 2).unwrap().cost;
        assert_eq!(fused_cost, 4);
    }
}
