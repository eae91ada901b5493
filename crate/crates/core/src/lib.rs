//! Anticipatory monitoring of quantifier-free LTLf properties modulo theories.

pub mod automaton;
pub mod coreach;
pub mod logic;
pub mod monitor;
pub mod theory;
