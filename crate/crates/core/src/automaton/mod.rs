//! Compilation of properties into constraint-labelled automata.

pub mod delta;
pub mod export;
pub mod nfa;
pub mod symbol;

pub use delta::{delta, Delta, Expansion};
pub use export::{nfa_to_dot, nfa_to_json};
pub use nfa::{AutomatonError, Nfa, NfaState, SelectError, Step, Transition, DEFAULT_MAX_STATES};
pub use symbol::{symbol_consistent, LastMarker, Symbol};
