//! Transition labels: sets of constraints plus an optional last-instant marker.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::logic::formula::Formula;
use crate::logic::signature::Signature;
use crate::logic::term::{Literal, Named};
use crate::monitor::facts::{eval_literal, Env, FactBase, Tri};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LastMarker {
    /// No constraint on whether the instant is last.
    Absent,
    /// `λ`: only the last instant.
    Last,
    /// `¬λ`: any instant but the last.
    NotLast,
}

impl LastMarker {
    /// Combined marker, or `None` when `λ` meets `¬λ`.
    pub fn join(self, other: LastMarker) -> Option<LastMarker> {
        match (self, other) {
            (LastMarker::Absent, m) | (m, LastMarker::Absent) => Some(m),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }

    pub fn admits(self, is_last: bool) -> bool {
        match self {
            LastMarker::Absent => true,
            LastMarker::Last => is_last,
            LastMarker::NotLast => !is_last,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub lits: BTreeSet<Literal>,
    pub marker: LastMarker,
}

impl Symbol {
    pub fn empty() -> Symbol {
        Symbol { lits: BTreeSet::new(), marker: LastMarker::Absent }
    }

    pub fn marker(marker: LastMarker) -> Symbol {
        Symbol { lits: BTreeSet::new(), marker }
    }

    pub fn literal(l: Literal) -> Symbol {
        Symbol { lits: BTreeSet::from([l]), marker: LastMarker::Absent }
    }

    /// Union of two labels. `None` if the markers clash or a literal meets
    /// its complement.
    pub fn union(&self, other: &Symbol) -> Option<Symbol> {
        let marker = self.marker.join(other.marker)?;
        let mut lits = self.lits.clone();
        for l in &other.lits {
            if lits.contains(&l.negate()) {
                return None;
            }
            lits.insert(l.clone());
        }
        Some(Symbol { lits, marker })
    }

    /// The label with its marker dropped.
    pub fn without_marker(&self) -> Symbol {
        Symbol { lits: self.lits.clone(), marker: LastMarker::Absent }
    }

    /// Conjunction of the constraints; markers are ignored.
    pub fn formula(&self) -> Formula {
        Formula::cube(self.lits.iter().cloned())
    }

    pub fn has_prev(&self) -> bool {
        self.lits.iter().any(Literal::has_prev)
    }

    /// Evaluate the label against an instant with a caller-supplied literal
    /// evaluation.
    pub fn consistent_with(&self, is_last: bool, eval: &mut impl FnMut(&Literal) -> Tri) -> Tri {
        if !self.marker.admits(is_last) {
            return Tri::False;
        }
        let mut acc = Tri::True;
        for l in &self.lits {
            acc = acc.and(eval(l));
            if acc == Tri::False {
                break;
            }
        }
        acc
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> Named<'a, Symbol> {
        Named { sig, item: self }
    }
}

/// Whether the label is consistent with an instant of a trace. At instant 0
/// (`env.prev` is `None`) any literal that looks back is false.
pub fn symbol_consistent(s: &Symbol, facts: &FactBase, env: Env<'_>, is_last: bool) -> Tri {
    s.consistent_with(is_last, &mut |l| eval_literal(l, facts, env))
}

impl fmt::Display for Named<'_, Symbol> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.item.marker {
            LastMarker::Absent => {}
            LastMarker::Last => parts.push("λ".into()),
            LastMarker::NotLast => parts.push("¬λ".into()),
        }
        parts.extend(self.item.lits.iter().map(|l| l.display(self.sig).to_string()));
        write!(f, "{{{}}}", parts.join(", "))
    }
}
