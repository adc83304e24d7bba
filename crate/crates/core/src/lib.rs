//! Red-blue pebble game with partial computations.
//!
//! A toolkit for finding, validating, and cost-accounting pebbling strategies
//! on computational DAGs where operator fan-in may exceed the cache size:
//!
//! - [`dag`]: the DAG model, memory layouts, the `(M,B)` to `(M,1)`
//!   cache-line transform, and level decomposition;
//! - [`io`]: edge-list and Matrix Market ingestion;
//! - [`game`]: the game rules, move legality, strategy simulation, and the
//!   translation to machine instructions;
//! - [`conflict`]: the complete weighted graph over the DAG's edges whose
//!   Hamiltonian paths are exactly the pebbling strategies at capacity 2;
//! - [`exact`]: Held-Karp, brute-force enumeration, and state-space search
//!   oracles;
//! - [`approx`]: the Christofides-variant approximation and the multi-level
//!   composition;
//! - [`hardness`]: Hamiltonian-path reduction gadgets wired up as a built-in
//!   correctness harness;
//! - [`instances`]: seeded random instance generation.

pub mod approx;
pub mod conflict;
pub mod dag;
pub mod error;
pub mod exact;
pub mod game;
pub mod hardness;
pub mod instances;
pub mod io;

pub use approx::{
    christofides_detailed, christofides_path, euler_tour, min_cost_perfect_matching, mst,
    multi_level_solve, ChristofidesRun, EulerMultigraph, Matching, MultiLevelSolution, PathSolver,
    RatioReport, SpanningTree,
};
pub use conflict::{
    augment_with_depot, path_to_strategy, strategy_to_path, ConflictGraph, DepotGraph, EdgeId,
    HamPath,
};
pub use dag::{
    compute_levels, transform_cache_lines, Dag, Level, LeveledDag, MemoryLayout, NodeId, NodeRole,
};
pub use error::{Error, Result, RuleViolation};
pub use exact::{
    enumerate_min_cycle, enumerate_min_path, exhaustive_tour, held_karp_path, state_space_opt,
    Optimum, Tour,
};
pub use game::{
    legal_moves, simulate, strategy_from_json, strategy_to_json, trace_to_json, CostModel,
    GameState, Instruction, InstructionTrace, Move, PebbleColor, SimulationReport, Strategy,
};
pub use hardness::{
    build_gadget_instance, has_hamiltonian_path, verify_reduction, GadgetInstance, ReductionCheck,
    SimpleGraph,
};
pub use instances::SplitMix64;
pub use io::{parse_edge_list, parse_matrix_market, write_edge_list};
