//! Constraint-labelled NFA of a property.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::logic::property::Property;
use crate::logic::signature::Signature;
use crate::logic::term::Literal;
use crate::monitor::facts::{eval_literal, Trace, Tri};
use crate::theory::Theory;

use super::delta::Delta;
use super::symbol::{LastMarker, Symbol};

pub const DEFAULT_MAX_STATES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NfaState {
    Formula(Property),
    /// `q+`: reached on the last instant with the obligation met.
    Accept,
    /// `q−`: reached on the last instant with the obligation failed.
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub from: usize,
    pub symbol: Symbol,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomatonError {
    #[error("automaton exceeds the budget of {0} states")]
    Budget(usize),
    #[error("expansion produced the non-terminal successor `{0}` on a last-instant label")]
    Internal(String),
}

/// Why no unique transition could be selected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SelectError {
    #[error("no outgoing transition is consistent with the instant")]
    NoTransition,
    #[error("{} outgoing transitions are consistent with the instant", .0.len())]
    Ambiguous(Vec<usize>),
    /// The facts do not determine this constraint.
    #[error("undetermined constraint")]
    Unknown(Literal),
}

/// Which transitions are candidates at an instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// Treat the instant as the last one; may enter `q+` or `q−`.
    Last,
    /// Continue to a property state for the next instant.
    Advance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nfa {
    pub property: Property,
    pub states: Vec<NfaState>,
    pub transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
}

impl Nfa {
    pub const INITIAL: usize = 0;
    pub const ACCEPT: usize = 1;
    pub const REJECT: usize = 2;

    /// Expand `p` to the least set of states closed under the expansion.
    /// With a theory, labels with unsatisfiable constraints are dropped.
    pub fn build(p: &Property, theory: Option<&mut dyn Theory>, max_states: usize) -> Result<Nfa, AutomatonError> {
        let mut delta = Delta::new(theory);
        let mut states = vec![NfaState::Formula(p.clone()), NfaState::Accept, NfaState::Reject];
        let mut index: HashMap<NfaState, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut transitions = Vec::new();
        let mut next = 0;
        while next < states.len() {
            let q = next;
            next += 1;
            let NfaState::Formula(prop) = states[q].clone() else { continue };
            for (succ, sym) in delta.expand(&prop) {
                let (target, sym) = if sym.marker == LastMarker::Last {
                    match succ {
                        Property::True => (NfaState::Accept, sym),
                        Property::False => (NfaState::Reject, sym.without_marker()),
                        other => return Err(AutomatonError::Internal(format!("{other:?}"))),
                    }
                } else {
                    (NfaState::Formula(succ.dnf()), sym)
                };
                let to = match index.get(&target) {
                    Some(&i) => i,
                    None => {
                        if states.len() >= max_states {
                            return Err(AutomatonError::Budget(max_states));
                        }
                        states.push(target.clone());
                        index.insert(target, states.len() - 1);
                        states.len() - 1
                    }
                };
                transitions.push(Transition { from: q, symbol: sym, to });
            }
        }
        let mut outgoing = vec![Vec::new(); states.len()];
        for (i, t) in transitions.iter().enumerate() {
            outgoing[t.from].push(i);
        }
        Ok(Nfa { property: p.clone(), states, transitions, outgoing })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn is_final(&self, q: usize) -> bool {
        matches!(self.states[q], NfaState::Accept | NfaState::Formula(Property::True))
    }

    pub fn outgoing(&self, q: usize) -> &[usize] {
        &self.outgoing[q]
    }

    /// States other than `q+` and `q−`.
    pub fn property_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.states.len()).filter(|&q| matches!(self.states[q], NfaState::Formula(_)))
    }

    /// The unique transition from `q` consistent with an instant, given a
    /// literal evaluation for that instant.
    pub fn select(&self, q: usize, step: Step, eval: &mut impl FnMut(&Literal) -> Tri) -> Result<usize, SelectError> {
        let mut hits = Vec::new();
        let mut unknown: Option<Literal> = None;
        for &t in &self.outgoing[q] {
            let tr = &self.transitions[t];
            let is_sink = tr.to == Self::ACCEPT || tr.to == Self::REJECT;
            let candidate = match step {
                Step::Last => tr.symbol.marker.admits(true),
                Step::Advance => tr.symbol.marker.admits(false) && !is_sink,
            };
            if !candidate {
                continue;
            }
            let v = tr.symbol.consistent_with(step == Step::Last, &mut |l| {
                let v = eval(l);
                if v == Tri::Unknown && unknown.is_none() {
                    unknown = Some(l.clone());
                }
                v
            });
            if v == Tri::True {
                hits.push(t);
            }
        }
        // Labels of one state are pairwise contradictory, so a single
        // consistent label settles every undetermined one.
        match hits.len() {
            1 => Ok(hits[0]),
            0 => Err(match unknown {
                Some(l) => SelectError::Unknown(l),
                None => SelectError::NoTransition,
            }),
            _ => Err(SelectError::Ambiguous(hits)),
        }
    }

    /// Follow the unique run on the trace; `Ok(true)` iff it ends in a final
    /// state. The error carries the failing instant.
    pub fn accepts(&self, tr: &Trace) -> Result<bool, (usize, SelectError)> {
        let n = tr.len();
        let mut q = Self::INITIAL;
        for i in 0..n {
            let env = tr.env(i);
            let step = if i + 1 == n { Step::Last } else { Step::Advance };
            let t = self.select(q, step, &mut |l| eval_literal(l, &tr.facts, env)).map_err(|e| (i, e))?;
            q = self.transitions[t].to;
        }
        Ok(self.is_final(q))
    }

    /// No label leaving the initial state mentions a previous-instant value.
    pub fn check_safe_lookback(&self) -> bool {
        self.outgoing[Self::INITIAL].iter().all(|&t| !self.transitions[t].symbol.has_prev())
    }

    pub fn state_label(&self, sig: &Signature, q: usize) -> String {
        match &self.states[q] {
            NfaState::Formula(p) => p.display(sig).to_string(),
            NfaState::Accept => "q+".into(),
            NfaState::Reject => "q-".into(),
        }
    }
}
