//! Backward analysis of automata: regression, coreachability graphs and
//! the lookback heuristic.

pub mod dot;
pub mod graph;
pub mod lookback;
pub mod regress;

pub use dot::cg_to_dot;
pub use graph::{
    build_cg, is_root_state, is_terminal_state, CgEdge, CgNode, CgOptions, CoreachError, CoreachGraph, Divergence,
    Polarity, DEFAULT_MAX_NODES,
};
pub use lookback::{bounded_lookback_check, computation_graph, ComputationGraph, LookbackBudget, LookbackResult};
pub use regress::{precond, regress, regress_body};
