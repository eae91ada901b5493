//! Online monitoring: one verdict per consumed assignment.

use std::collections::HashMap;

use crate::automaton::{Nfa, SelectError, Step};
use crate::logic::formula::Formula;
use crate::logic::term::{Literal, Term};
use crate::theory::{Theory, TheoryError};

use super::artifact::Compiled;
use super::facts::{eval_ground, eval_literal, Assignment, Env, FactBase, FactError, Trace, Tri};
use super::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MonitorError {
    #[error("the property constrains previous values at the first instant")]
    UnsafeLookback,
    #[error("the trace is empty")]
    EmptyTrace,
    #[error("instant {instant}: {msg}")]
    BadAssignment { instant: usize, msg: String },
    #[error("instant {instant}: the facts do not determine `{constraint}`")]
    InsufficientFacts { instant: usize, constraint: String },
    #[error("instant {instant}: no transition of state `{state}` is consistent")]
    NoTransition { instant: usize, state: String },
    #[error("instant {instant}: {count} transitions of state `{state}` are consistent; the facts are contradictory")]
    Nondeterministic { instant: usize, state: String, count: usize },
    #[error("instant {instant}: {source}")]
    Theory { instant: usize, source: TheoryError },
}

/// Monitoring state for one trace. Facts are fixed when the session starts.
pub struct Session<'a> {
    art: &'a Compiled,
    facts: FactBase,
    /// Present in entailment mode: undetermined constraints are decided by
    /// whether the facts entail them.
    entail: Option<Box<dyn Theory>>,
    axioms: Vec<Literal>,
    state: usize,
    prev: Option<Assignment>,
    instant: usize,
}

impl<'a> Session<'a> {
    pub fn new(art: &'a Compiled, facts: FactBase) -> Result<Self, MonitorError> {
        if !art.safe_lookback {
            return Err(MonitorError::UnsafeLookback);
        }
        Ok(Session { art, facts, entail: None, axioms: Vec::new(), state: Nfa::INITIAL, prev: None, instant: 0 })
    }

    /// Treat the facts as axioms and decide otherwise undetermined
    /// constraints by entailment.
    pub fn with_entailment(mut self, theory: Box<dyn Theory>) -> Self {
        self.axioms = self.facts.as_literals(&self.art.signature);
        self.entail = Some(theory);
        self
    }

    pub fn instant(&self) -> usize {
        self.instant
    }

    /// The automaton state reached by the consumed prefix, read as unfinished.
    pub fn state(&self) -> usize {
        self.state
    }

    pub fn facts(&self) -> &FactBase {
        &self.facts
    }

    fn check_assignment(&self, a: &Assignment) -> Result<(), MonitorError> {
        let sig = &self.art.signature;
        let bad = |msg: String| MonitorError::BadAssignment { instant: self.instant, msg };
        if a.0.len() != sig.num_vars() {
            return Err(bad(format!("expected {} values, got {}", sig.num_vars(), a.0.len())));
        }
        for v in sig.var_ids() {
            self.facts.check_value(sig, sig.var_sort(v), a.get(v)).map_err(|e: FactError| {
                bad(format!("variable `{}`: {e}", sig.variable(v).name))
            })?;
        }
        Ok(())
    }

    fn bindings(&self, a: &Assignment) -> Vec<Literal> {
        let sig = &self.art.signature;
        let mut out = Vec::new();
        for v in sig.var_ids() {
            let s = sig.var_sort(v);
            out.push(Literal::eq(Term::Var(v), a.get(v).to_term(s)));
            if let Some(p) = &self.prev {
                out.push(Literal::eq(Term::Prev(v), p.get(v).to_term(s)));
            }
        }
        out
    }

    /// Decide `f` by entailment from the facts and the current values.
    fn entailed(&mut self, f: &Formula, a: &Assignment) -> Result<Tri, TheoryError> {
        let premise = Formula::cube(self.axioms.iter().cloned().chain(self.bindings(a)));
        let th = self.entail.as_mut().expect("entailment mode");
        if th.entails(&premise, f)? {
            Ok(Tri::True)
        } else if th.entails(&premise, &f.negate())? {
            Ok(Tri::False)
        } else {
            Ok(Tri::Unknown)
        }
    }

    fn eval(&mut self, f: &Formula, a: &Assignment) -> Result<Tri, TheoryError> {
        let env = Env { prev: self.prev.as_ref(), curr: a };
        let v = eval_ground(f, &self.facts, env);
        if v != Tri::Unknown || self.entail.is_none() {
            return Ok(v);
        }
        self.entailed(f, a)
    }

    /// Truth of every literal on the outgoing labels of the current state.
    fn decide_labels(&mut self, a: &Assignment) -> Result<HashMap<Literal, Tri>, TheoryError> {
        let nfa = &self.art.nfa;
        let mut lits: Vec<Literal> = Vec::new();
        for &t in nfa.outgoing(self.state) {
            lits.extend(nfa.transitions[t].symbol.lits.iter().cloned());
        }
        let mut out = HashMap::new();
        for l in lits {
            if out.contains_key(&l) {
                continue;
            }
            let v = self.eval(&Formula::lit(l.clone()), a)?;
            out.insert(l, v);
        }
        Ok(out)
    }

    fn select(&mut self, step: Step, a: &Assignment) -> Result<usize, MonitorError> {
        let res = if self.entail.is_some() {
            let table = self.decide_labels(a).map_err(|e| MonitorError::Theory { instant: self.instant, source: e })?;
            self.art.nfa.select(self.state, step, &mut |l| table.get(l).copied().unwrap_or(Tri::Unknown))
        } else {
            let env = Env { prev: self.prev.as_ref(), curr: a };
            self.art.nfa.select(self.state, step, &mut |l| eval_literal(l, &self.facts, env))
        };
        let (nfa, sig) = (&self.art.nfa, &self.art.signature);
        res.map_err(|e| match e {
            SelectError::Unknown(l) => {
                MonitorError::InsufficientFacts { instant: self.instant, constraint: l.display(sig).to_string() }
            }
            SelectError::NoTransition => {
                MonitorError::NoTransition { instant: self.instant, state: nfa.state_label(sig, self.state) }
            }
            SelectError::Ambiguous(ts) => MonitorError::Nondeterministic {
                instant: self.instant,
                state: nfa.state_label(sig, self.state),
                count: ts.len(),
            },
        })
    }

    /// Consume the next assignment and report the verdict for the prefix
    /// ending with it.
    pub fn step(&mut self, a: Assignment) -> Result<Verdict, MonitorError> {
        self.check_assignment(&a)?;
        let t_last = self.select(Step::Last, &a)?;
        let t_adv = self.select(Step::Advance, &a)?;
        let nfa = &self.art.nfa;
        let satisfied = nfa.is_final(nfa.transitions[t_last].to);
        let next = nfa.transitions[t_adv].to;
        let verdict = if self.art.degraded() {
            if satisfied {
                Verdict::SatisfiedSoFar
            } else {
                Verdict::ViolatedSoFar
            }
        } else {
            let f = if satisfied { &self.art.viol_cont[next] } else { &self.art.sat_cont[next] };
            let f = f.clone();
            let v = self.eval(&f, &a).map_err(|e| MonitorError::Theory { instant: self.instant, source: e })?;
            match (satisfied, v) {
                (true, Tri::True) => Verdict::Cs,
                (true, Tri::False) => Verdict::Ps,
                (false, Tri::True) => Verdict::Cv,
                (false, Tri::False) => Verdict::Pv,
                (_, Tri::Unknown) => {
                    return Err(MonitorError::InsufficientFacts {
                        instant: self.instant,
                        constraint: f.display(&self.art.signature).to_string(),
                    })
                }
            }
        };
        self.state = next;
        self.prev = Some(a);
        self.instant += 1;
        Ok(verdict)
    }
}

/// Verdict for every prefix of the trace.
pub fn monitor_prefixes(art: &Compiled, tr: &Trace) -> Result<Vec<Verdict>, MonitorError> {
    if tr.is_empty() {
        return Err(MonitorError::EmptyTrace);
    }
    let mut s = Session::new(art, tr.facts.clone())?;
    tr.assignments.iter().map(|a| s.step(a.clone())).collect()
}

/// Verdict for the whole trace.
pub fn monitor(art: &Compiled, tr: &Trace) -> Result<Verdict, MonitorError> {
    Ok(monitor_prefixes(art, tr)?.pop().expect("nonempty"))
}
