//! Signatures, terms, constraints, properties and their concrete syntax.

pub mod formula;
pub mod parse;
pub mod property;
pub mod semantics;
pub mod sexpr;
pub mod signature;
pub mod subst;
pub mod term;
