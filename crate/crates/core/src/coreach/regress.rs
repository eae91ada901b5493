//! One-step backward regression of state constraints over transition labels.

use crate::automaton::Symbol;
use crate::logic::formula::Formula;
use crate::logic::signature::Signature;
use crate::logic::term::Term;
use crate::theory::{Theory, TheoryError};

/// Fresh variables standing for the next instant's values, one per state
/// variable, numbered above every auxiliary already in use.
fn next_copies(sig: &Signature, phi: &Formula, s: &Symbol) -> Vec<Term> {
    let base = phi
        .max_aux()
        .into_iter()
        .chain(s.lits.iter().filter_map(|l| l.max_aux()))
        .max()
        .map_or(0, |m| m + 1);
    sig.var_ids().map(|v| Term::Aux(base + v.0, sig.var_sort(v))).collect()
}

/// The constraint on the current values under which some next instant
/// satisfies `s` (markers ignored) and ends in a state satisfying `phi`:
/// `∃Y. s[prev V := V, V := Y] ∧ phi[V := Y]`, with `Y` eliminated.
pub fn regress(sig: &Signature, th: &mut dyn Theory, phi: &Formula, s: &Symbol) -> Result<Formula, TheoryError> {
    let (body, ys) = regress_body(sig, phi, s);
    th.qe(&ys, &body)
}

/// The existential body of the regression and its bound variables.
pub fn regress_body(sig: &Signature, phi: &Formula, s: &Symbol) -> (Formula, Vec<Term>) {
    let ys = next_copies(sig, phi, s);
    let shift = |t: &Term| match t {
        Term::Var(v) => Some(ys[v.0 as usize].clone()),
        Term::Prev(v) => Some(Term::Var(*v)),
        _ => None,
    };
    let label = s.formula().replace(&shift);
    let target = phi.replace(&|t: &Term| match t {
        Term::Var(v) => Some(ys[v.0 as usize].clone()),
        _ => None,
    });
    (Formula::and([label, target]), ys)
}

/// Regression through a whole word: the condition on the current values
/// under which some continuation is consistent with the word, ending in a
/// state satisfying `end`.
pub fn precond(sig: &Signature, th: &mut dyn Theory, word: &[Symbol], end: &Formula) -> Result<Formula, TheoryError> {
    let mut phi = end.clone();
    for s in word.iter().rev() {
        phi = regress(sig, th, &phi, s)?;
    }
    Ok(phi)
}
