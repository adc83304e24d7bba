//! Crate-wide error type.

use thiserror::Error;

/// The game rule a rejected move would have violated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleViolation {
    /// Placing a pebble would exceed the capacity `M` (rule R5).
    #[error("capacity reached: {capacity} pebbles already on the graph")]
    CapacityReached { capacity: usize },
    /// A red pebble can only be placed on a pebble-free vertex (rule R1).
    #[error("vertex '{node}' already carries a pebble")]
    Occupied { node: String },
    /// The move requires a red pebble on the vertex (rule R2).
    #[error("vertex '{node}' does not carry a red pebble")]
    NotRed { node: String },
    /// The move requires a blue pebble on the vertex (rule R3).
    #[error("vertex '{node}' does not carry a blue pebble")]
    NotBlue { node: String },
    /// Fused store+load is only available in the fused cost model.
    #[error("fused store+load is not available in the standard cost model")]
    FusedUnavailable,
    /// The move references a node outside the graph.
    #[error("node index {index} out of range")]
    UnknownNode { index: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    // Ingestion and DAG construction.
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("duplicate node name '{name}'")]
    DuplicateNode { name: String },
    #[error("self-loop on node '{node}'")]
    SelfLoop { node: String },
    #[error("duplicate edge '{src}' -> '{dst}'")]
    DuplicateEdge { src: String, dst: String },
    #[error("graph contains a cycle through node '{node}'")]
    Cycle { node: String },

    // Memory layout and the cache-line transform.
    #[error("memory layout: {reason}")]
    Layout { reason: String },
    #[error("edge '{src}' -> '{dst}' has both endpoints in cache line {line}")]
    EdgeWithinLine { src: String, dst: String, line: u64 },

    // Level decomposition.
    #[error("edge '{src}' -> '{dst}' spans {span} levels; expected exactly 1")]
    NotLeveled {
        src: String,
        dst: String,
        span: usize,
    },

    // Pebble game.
    #[error("illegal move: {0}")]
    Rule(RuleViolation),
    #[error("move {index} is illegal: {violation}")]
    RuleAt {
        index: usize,
        violation: RuleViolation,
    },
    #[error("strategy is not terminal: {remaining} edges remain, {dirty} blue pebbles unstored")]
    NonTerminal { remaining: usize, dirty: usize },

    // Conflict graph and path conversions.
    #[error("conflict graph requires a one-level bipartite DAG: {reason}")]
    NotBipartite { reason: String },
    #[error("conflict graph has no vertices")]
    EmptyConflictGraph,
    #[error("edge order is not a permutation of the DAG edges")]
    NotAPermutation,
    #[error("cost model mismatch: strategy uses {strategy}, graph uses {graph}")]
    ModelMismatch { strategy: String, graph: String },
    #[error("a single move deleted {count} edges at once; no unique edge order")]
    AmbiguousDeletion { count: usize },

    // Solvers.
    #[error("{what}: instance too large ({actual} > {limit})")]
    SizeGuard {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("no pebbling strategy exists with capacity {capacity}")]
    Unsolvable { capacity: usize },
    #[error("matching requires an even vertex set, got {count} vertices")]
    OddMatchingSet { count: usize },
    #[error("vertex {vertex} has odd degree {degree}; multigraph is not Eulerian")]
    OddDegree { vertex: usize, degree: usize },
    #[error("multigraph is disconnected; no Euler tour exists")]
    Disconnected,

    // Instance generation.
    #[error("invalid parameters: {reason}")]
    BadParameters { reason: String },

    // Plumbing.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
