//! Solver library for multi-dimensional energy and bounding games on multi-weighted game graphs.
//!
//! Foundations:
//!
//! - [`game`]: multi-weighted game graphs, plays, validation, simple cycles, and the
//!   cycle-decomposition stack shared by every strategy memory;
//! - [`geometry`]: M-generated subspaces, open half-spaces, and perfect half-spaces — the
//!   colour space of first-cycle games and strategy automata — with deterministic enumeration
//!   and the shift/cancellation target computations;
//! - [`linalg`]: exact rational linear algebra, the alternatives dichotomy, and small positive
//!   kernel solutions;
//! - [`error`]: the error taxonomy (invalid input, violated standing assumptions, exceeded
//!   budgets, and internal falsifications).
//!
//! Built strictly on those:
//!
//! - [`transforms`]: the lossy extension, coordinate capping, and the capped chain that turns
//!   given-credit energy questions into finite safety games;
//! - [`fcb`]: the first-cycle bounding game — colour-annotated states, cycle evaluation, the
//!   fixed-point solver, and independent strategy-table verification;
//! - [`strategy`]: exact threshold packs, Player 1's counter-automaton strategy and Player 2's
//!   cycle-cutting lift, the textual strategy grammar, and the seeded simulator;
//! - [`solver`]: the box arenas and the public verdicts — bounding, arbitrary-credit energy,
//!   given-credit energy, and Pareto sweeps;
//! - [`oracle`]: independent brute-force searches (self-covering trees, forced losses) and the
//!   cross-check harness that plays every route against the others;
//! - [`format`]: the JSON game-file format, DOT export, digests, and run manifests;
//! - [`fixtures`]: the small pinned graphs used throughout the tests.

pub mod error;
pub mod fcb;
pub mod fixtures;
pub mod format;
pub mod game;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod solver;
pub mod strategy;
pub mod transforms;

pub use error::{CoreError, Result, Violation};
pub use fcb::{
    evaluate_cycle, fcb_move, fcb_universe_norm, solve_fcb, verify_fcb_strategy, ColouredStep,
    FCBDecision, FCBState, FCBStrategy,
};
pub use format::{
    game_from_str, game_to_dot, game_to_string, load_game, save_game, sha256_hex, RunManifest,
};
pub use game::{
    Configuration, Edge, EdgeIdx, GameGraph, Player, SimpleCycle, Trace, Vertex, VertexIdx, Weight,
};
pub use geometry::{
    bound_l, enumerate_m_open_halfspaces, hs_lt, lca, pphs_prec, OpenHalfSpace, PerfectHalfSpace,
    Subspace, Universe, DEFAULT_GEOMETRY_BUDGET,
};
pub use linalg::{
    alternatives, bound_s, containing_closed_halfspace, positive_kernel_solution, Alternative,
    ColumnSystem, Rat,
};
pub use oracle::{
    cross_check, forced_loss_search, random_game, self_covering_search, verify_self_covering,
    CoverCertificate, CrossCheckReport, OracleVerdict, SelfCoveringNode,
};
pub use solver::{
    pareto_limit, solve_arbitrary_credit, solve_bounding, solve_given_credit, solve_safety_box,
    solve_vertex_safety, BoxArena, BoxStrategy, ParetoResult, SolveMethod, SolveMode, SolveOpts,
    SolveResult, DEFAULT_SEARCH_BUDGET, PARETO_CANDIDATE_BUDGET,
};
pub use strategy::{
    bounds, p1_auto_step, p2_lift_step, parse_strategy_spec, simulate, BoundsPack,
    CounterSnapshot, CounterTable, EventKind, EventRecord, LoggedEvent, P1Memory, P2Memory,
    SimulationReport, StrategySpec, DEFAULT_CYCLE_CAP,
};
pub use transforms::{
    arena_size_bound, capped, capped_chain, capped_id, chain_start_id, lossy, BOTTOM_ID,
    DEFAULT_ARENA_BUDGET,
};
