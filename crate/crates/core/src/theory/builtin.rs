//! In-process backend built on congruence closure, order graphs and covers.

use std::collections::HashMap;
use std::time::Duration;

use crate::logic::formula::{Cube, Formula};
use crate::logic::signature::Signature;
use crate::logic::term::{Atom, Literal, Term};

use super::closure::Closure;
use super::cover::{check_cover_signature, cover_cube};
use super::mc::is_mc_literal;
use super::{cycle_message, Deadline, Theory, TheoryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinMode {
    /// Requires an acyclic signature; order literals are rejected.
    Euf,
    /// Every literal must be a monotonicity constraint.
    Mc,
    /// Requires a tame signature.
    Tame,
}

#[derive(Debug, Clone)]
pub struct Builtin {
    sig: Signature,
    mode: BuiltinMode,
    timeout: Option<Duration>,
    sat_cache: HashMap<Formula, bool>,
}

impl Builtin {
    pub fn new(sig: &Signature, mode: BuiltinMode, timeout: Option<Duration>) -> Result<Self, TheoryError> {
        match mode {
            BuiltinMode::Euf => {
                if let Some(cycle) = sig.sort_cycle() {
                    return Err(TheoryError::Refused(cycle_message(sig, &cycle)));
                }
            }
            BuiltinMode::Tame => {
                if let Some(cycle) = sig.sort_cycle() {
                    return Err(TheoryError::Refused(cycle_message(sig, &cycle)));
                }
                if !sig.is_tame() {
                    return Err(TheoryError::Refused("signature is not tame: an arithmetic sort has outgoing functions".into()));
                }
            }
            BuiltinMode::Mc => {}
        }
        Ok(Builtin { sig: sig.clone(), mode, timeout, sat_cache: HashMap::new() })
    }

    /// A backend with the most permissive mode and no time limit.
    pub fn unchecked(sig: &Signature) -> Self {
        Builtin { sig: sig.clone(), mode: BuiltinMode::Mc, timeout: None, sat_cache: HashMap::new() }
    }

    fn check_literal(&self, l: &Literal) -> Result<(), TheoryError> {
        let compound = l.atom.terms().iter().any(|t| t.is_arithmetic_compound());
        let bad = match self.mode {
            BuiltinMode::Euf => l.atom.is_order() || compound,
            BuiltinMode::Mc | BuiltinMode::Tame => compound || !(l.atom.is_order() || is_mc_literal(l) || matches!(l.atom, Atom::Pred(..))),
        };
        if bad {
            return Err(TheoryError::Unsupported(format!("literal `{}` outside the backend fragment", l.display(&self.sig))));
        }
        Ok(())
    }

    fn check_formula(&self, f: &Formula) -> Result<(), TheoryError> {
        let mut res = Ok(());
        f.visit_literals(&mut |l| {
            if res.is_ok() {
                res = self.check_literal(l);
            }
        });
        res
    }

    fn cube_sat(&self, lits: &[Literal], deadline: &Deadline) -> Result<bool, TheoryError> {
        let mut cl = Closure::new(&self.sig);
        for l in lits {
            cl.add_literal(l)?;
        }
        cl.saturate(deadline)
    }

    fn search(&self, mut lits: Cube, mut todo: Vec<Formula>, deadline: &Deadline) -> Result<bool, TheoryError> {
        let mut disjunctions = Vec::new();
        while let Some(f) = todo.pop() {
            match f {
                Formula::True => {}
                Formula::False => return Ok(false),
                Formula::Lit(l) => lits.push(l),
                Formula::And(fs) => todo.extend(fs),
                Formula::Or(_) => disjunctions.push(f),
            }
        }
        if !self.cube_sat(&lits, deadline)? {
            return Ok(false);
        }
        // branch on the smallest disjunction first
        disjunctions.sort_by_key(|d| std::cmp::Reverse(if let Formula::Or(ds) = d { ds.len() } else { 0 }));
        let Some(Formula::Or(branches)) = disjunctions.pop() else {
            return Ok(true);
        };
        for b in branches {
            let mut next = disjunctions.clone();
            next.push(b);
            if self.search(lits.clone(), next, deadline)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Drop unsatisfiable cubes and subsumed disjuncts.
    pub fn simplify(&mut self, f: &Formula) -> Result<Formula, TheoryError> {
        let deadline = Deadline::after(self.timeout);
        let mut keep = Vec::new();
        for c in f.dnf() {
            if self.cube_sat(&c, &deadline)? {
                keep.push(c);
            }
        }
        Ok(Formula::from_cubes(keep))
    }
}

impl Theory for Builtin {
    fn name(&self) -> String {
        match self.mode {
            BuiltinMode::Euf => "euf".into(),
            BuiltinMode::Mc => "mc".into(),
            BuiltinMode::Tame => "tame".into(),
        }
    }

    fn is_satisfiable(&mut self, f: &Formula) -> Result<bool, TheoryError> {
        if let Some(&b) = self.sat_cache.get(f) {
            return Ok(b);
        }
        self.check_formula(f)?;
        let deadline = Deadline::after(self.timeout);
        let b = self.search(Vec::new(), vec![f.clone()], &deadline)?;
        self.sat_cache.insert(f.clone(), b);
        Ok(b)
    }

    fn qe(&mut self, ys: &[Term], f: &Formula) -> Result<Formula, TheoryError> {
        self.check_formula(f)?;
        check_cover_signature(&self.sig)?;
        if let Some(y) = ys.iter().find(|y| !y.is_variable()) {
            return Err(TheoryError::Unsupported(format!("cannot eliminate non-variable `{}`", y.display(&self.sig))));
        }
        let deadline = Deadline::after(self.timeout);
        let mut parts = Vec::new();
        for cube in f.dnf() {
            deadline.check()?;
            parts.push(cover_cube(&self.sig, ys, &cube, &deadline)?);
        }
        self.simplify(&Formula::or(parts))
    }
}
