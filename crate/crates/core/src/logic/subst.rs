//! Sort-checked simultaneous substitution.

use std::collections::HashMap;

use super::formula::Formula;
use super::signature::Signature;
use super::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot substitute `{from}` by `{to}`: sort mismatch")]
pub struct SortMismatch {
    pub from: String,
    pub to: String,
}

/// Replace variables (current, previous or auxiliary) simultaneously.
/// Unmapped variables are left unchanged.
pub fn substitute(sig: &Signature, f: &Formula, map: &HashMap<Term, Term>) -> Result<Formula, SortMismatch> {
    for (from, to) in map {
        if from.sort(sig) != to.sort(sig) {
            return Err(SortMismatch {
                from: from.display(sig).to_string(),
                to: to.display(sig).to_string(),
            });
        }
    }
    Ok(f.replace(&|t: &Term| if t.is_variable() { map.get(t).cloned() } else { None }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::{parse_formula, parse_signature};

    fn sig() -> Signature {
        parse_signature(
            "(sort Ticket) (sort Real :rational) (fun price (Ticket) Real)
             (var x Ticket) (var y Ticket) (var t Ticket) (var b Ticket)",
        )
        .unwrap()
    }

    fn var(sig: &Signature, n: &str) -> Term {
        Term::Var(sig.var_by_name(n).unwrap())
    }

    #[test]
    fn simultaneous_replacement() {
        let sig = sig();
        let f = parse_formula("(= x (prev x))", &sig).unwrap();
        let x = sig.var_by_name("x").unwrap();
        let map = HashMap::from([(Term::Prev(x), var(&sig, "x")), (var(&sig, "x"), var(&sig, "y"))]);
        assert_eq!(substitute(&sig, &f, &map).unwrap(), parse_formula("(= y x)", &sig).unwrap());
    }

    #[test]
    fn replaces_under_functions() {
        let sig = sig();
        let f = parse_formula("(< (price t) (price (prev b)))", &sig).unwrap();
        let b = sig.var_by_name("b").unwrap();
        let map = HashMap::from([(Term::Prev(b), var(&sig, "b")), (var(&sig, "t"), var(&sig, "y"))]);
        let want = parse_formula("(< (price y) (price b))", &sig).unwrap();
        assert_eq!(substitute(&sig, &f, &map).unwrap(), want);
        assert_eq!(substitute(&sig, &f, &HashMap::new()).unwrap(), f);
    }

    #[test]
    fn sort_mismatch_rejected() {
        let sig = sig();
        let f = parse_formula("(= x y)", &sig).unwrap();
        let r = sig.sort_by_name("Real").unwrap();
        let map = HashMap::from([(var(&sig, "x"), Term::int(1, r))]);
        assert!(substitute(&sig, &f, &map).is_err());
    }
}
