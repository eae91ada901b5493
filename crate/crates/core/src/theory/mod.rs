//! Theory reasoning: satisfiability, covers and equivalence of
//! quantifier-free constraints.

mod builtin;
pub(crate) mod closure;
mod cover;
pub mod mc;
pub mod models;
pub mod smtlib;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::logic::formula::Formula;
use crate::logic::signature::Signature;
use crate::logic::term::{Literal, Term};

pub use builtin::{Builtin, BuiltinMode};
pub use mc::{is_mc_literal, qe_mc};
pub use smtlib::External;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    /// A time or size budget ran out; the question is undecided.
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("unsupported by this backend: {0}")]
    Unsupported(String),
    #[error("solver failure: {0}")]
    Solver(String),
    /// The backend's precondition on the signature does not hold.
    #[error("backend refused: {0}")]
    Refused(String),
}

/// Wall-clock limit for a single backend call.
#[derive(Debug, Clone, Copy)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn none() -> Self {
        Deadline(None)
    }

    pub fn after(timeout: Option<Duration>) -> Self {
        Deadline(timeout.map(|t| Instant::now() + t))
    }

    pub fn check(&self) -> Result<(), TheoryError> {
        match self.0 {
            Some(end) if Instant::now() > end => Err(TheoryError::Resource("solver time budget exceeded".into())),
            _ => Ok(()),
        }
    }
}

/// A decision procedure for a background theory and its model completion.
///
/// Formulas may mention current (`x`), previous (`prev x`) and auxiliary
/// variables; all are treated as free.
pub trait Theory {
    fn name(&self) -> String;

    fn is_satisfiable(&mut self, f: &Formula) -> Result<bool, TheoryError>;

    /// A quantifier-free formula equivalent in the model completion to `∃ ys. f`.
    fn qe(&mut self, ys: &[Term], f: &Formula) -> Result<Formula, TheoryError>;

    fn are_equivalent(&mut self, a: &Formula, b: &Formula) -> Result<bool, TheoryError> {
        if a == b {
            return Ok(true);
        }
        Ok(!self.is_satisfiable(&Formula::and([a.clone(), b.negate()]))?
            && !self.is_satisfiable(&Formula::and([b.clone(), a.negate()]))?)
    }

    /// Whether `premise` entails `goal`.
    fn entails(&mut self, premise: &Formula, goal: &Formula) -> Result<bool, TheoryError> {
        Ok(!self.is_satisfiable(&Formula::and([premise.clone(), goal.negate()]))?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendKind {
    /// Equality and unary functions over an acyclic signature.
    Euf,
    /// Monotonicity constraints over dense orders.
    Mc,
    /// Tame combination of the two.
    Tame,
    /// An SMT-LIB solver run as a child process.
    External(String),
}

impl BackendKind {
    pub fn parse(s: &str) -> Option<BackendKind> {
        match s {
            "euf" => Some(BackendKind::Euf),
            "mc" => Some(BackendKind::Mc),
            "tame" => Some(BackendKind::Tame),
            "external" => Some(BackendKind::External(default_solver_command())),
            _ => s.strip_prefix("external:").map(|c| BackendKind::External(c.to_string())),
        }
    }

    pub fn label(&self) -> String {
        match self {
            BackendKind::Euf => "euf".into(),
            BackendKind::Mc => "mc".into(),
            BackendKind::Tame => "tame".into(),
            BackendKind::External(c) => format!("external:{c}"),
        }
    }
}

/// Environment variable naming the default external solver command.
pub const SOLVER_ENV: &str = "DATAMON_SOLVER";

pub fn default_solver_command() -> String {
    std::env::var(SOLVER_ENV).unwrap_or_else(|_| "z3 -in".to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryConfig {
    pub backend: BackendKind,
    /// Per-call limit; `None` means unlimited.
    pub solver_timeout: Option<Duration>,
}

impl Default for TheoryConfig {
    fn default() -> Self {
        TheoryConfig { backend: BackendKind::Tame, solver_timeout: Some(Duration::from_secs(30)) }
    }
}

impl TheoryConfig {
    pub fn new(backend: BackendKind) -> Self {
        TheoryConfig { backend, ..Default::default() }
    }

    /// Instantiate the backend, checking its signature preconditions.
    pub fn instantiate(&self, sig: &Signature) -> Result<Box<dyn Theory>, TheoryError> {
        let mode = match &self.backend {
            BackendKind::Euf => BuiltinMode::Euf,
            BackendKind::Mc => BuiltinMode::Mc,
            BackendKind::Tame => BuiltinMode::Tame,
            BackendKind::External(cmd) => {
                return Ok(Box::new(External::spawn(sig, cmd, self.solver_timeout)?));
            }
        };
        Ok(Box::new(Builtin::new(sig, mode, self.solver_timeout)?))
    }
}

/// The sort graph has no directed cycle.
pub fn check_acyclic(sig: &Signature) -> bool {
    sig.is_acyclic()
}

/// No function takes an argument of arithmetic sort.
pub fn check_tame(sig: &Signature) -> bool {
    sig.is_tame()
}

/// Cover for equality with uninterpreted functions over an acyclic signature.
pub fn euf_cover(sig: &Signature, ys: &[Term], cube: &[Literal]) -> Result<Formula, TheoryError> {
    if let Some(cycle) = sig.sort_cycle() {
        return Err(TheoryError::Refused(cycle_message(sig, &cycle)));
    }
    if let Some(l) = cube.iter().find(|l| l.atom.is_order()) {
        return Err(TheoryError::Unsupported(format!("`{}` is not an EUF literal", l.display(sig))));
    }
    cover::cover_cube(sig, ys, cube, &Deadline::none())
}

/// Combined cover for tame signatures: EUF literals plus monotonicity
/// constraints over terms of rational sort.
pub fn tame_comb_cover(sig: &Signature, ys: &[Term], cube: &[Literal]) -> Result<Formula, TheoryError> {
    if !sig.is_tame() {
        return Err(TheoryError::Refused("signature is not tame".into()));
    }
    if let Some(l) = cube.iter().find(|l| l.atom.terms().iter().any(|t| t.is_arithmetic_compound())) {
        return Err(TheoryError::Unsupported(format!("`{}` is not a monotonicity constraint", l.display(sig))));
    }
    cover::cover_cube(sig, ys, cube, &Deadline::none())
}

pub(crate) fn cycle_message(sig: &Signature, cycle: &[crate::logic::signature::SortId]) -> String {
    let names: Vec<&str> = cycle.iter().map(|s| sig.sort(*s).name.as_str()).collect();
    format!("sort graph has a cycle through {}", names.join(" -> "))
}
