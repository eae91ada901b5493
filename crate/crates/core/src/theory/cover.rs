//! Covers (quantifier elimination in the model completion) for conjunctions
//! over unary uninterpreted functions, predicates and monotonicity
//! constraints over rational sorts.
//!
//! The conjunction is closed under congruence and order reasoning. Every
//! class that can be named without eliminated variables gets its smallest
//! such term as representative; the projection keeps all facts between
//! named classes. Unnamed classes can be realised by fresh elements, except
//! that rational classes stay constrained by the order; those become
//! auxiliary variables removed by Fourier–Motzkin.

use std::collections::{BTreeMap, HashSet};

use crate::logic::formula::{Cube, Formula};
use crate::logic::signature::{Signature, SortKind};
use crate::logic::term::{Literal, Term};

use super::closure::Closure;
use super::mc::qe_mc;
use super::{Deadline, TheoryError};

/// Preconditions shared by the built-in cover procedures.
pub(crate) fn check_cover_signature(sig: &Signature) -> Result<(), TheoryError> {
    if sig.max_function_arity() > 1 {
        return Err(TheoryError::Unsupported(
            "built-in covers need functions of arity at most one".into(),
        ));
    }
    if sig.has_arithmetic_predicates() {
        return Err(TheoryError::Unsupported(
            "built-in covers do not support predicates over arithmetic sorts".into(),
        ));
    }
    Ok(())
}

fn key(t: &Term) -> (usize, &Term) {
    (t.size(), t)
}

/// Cover of `∃ ys. cube`.
pub(crate) fn cover_cube(
    sig: &Signature,
    ys: &[Term],
    cube: &[Literal],
    deadline: &Deadline,
) -> Result<Formula, TheoryError> {
    check_cover_signature(sig)?;
    let mut cl = Closure::new(sig);
    for l in cube {
        cl.add_literal(l)?;
    }
    if !cl.saturate(deadline)? {
        return Ok(Formula::False);
    }
    let eliminated: HashSet<&Term> = ys.iter().collect();
    let n = cl.terms.len();

    // Representatives: smallest term free of eliminated variables per class.
    let mut rep: BTreeMap<usize, Term> = BTreeMap::new();
    let construct = |n: usize, rep: &BTreeMap<usize, Term>, cl: &Closure| -> Option<Term> {
        match &cl.terms[n] {
            Term::App(f, _) => {
                let args: Option<Vec<Term>> = cl.kids[n].iter().map(|&k| rep.get(&cl.find(k)).cloned()).collect();
                args.map(|a| Term::App(*f, a))
            }
            t if eliminated.contains(t) => None,
            t => Some(t.clone()),
        }
    };
    loop {
        deadline.check()?;
        let mut changed = false;
        for i in 0..n {
            if let Some(t) = construct(i, &rep, &cl) {
                let r = cl.find(i);
                let better = match rep.get(&r) {
                    Some(old) => key(&t) < key(old),
                    None => true,
                };
                if better {
                    rep.insert(r, t);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut lits: Cube = Vec::new();
    let mut clauses: Vec<Formula> = Vec::new();

    // equalities among nameable terms
    for i in 0..n {
        if let Some(t) = construct(i, &rep, &cl) {
            let r = &rep[&cl.find(i)];
            if &t != r {
                lits.push(Literal::eq(r.clone(), t));
            }
        }
    }

    let is_rational = |i: usize| sig.sort_kind(cl.sort_of(i)) == SortKind::Rational;
    let next_aux = cube
        .iter()
        .filter_map(Literal::max_aux)
        .chain(ys.iter().filter_map(Term::max_aux))
        .max()
        .map_or(0, |m| m + 1);
    let mut fresh: BTreeMap<usize, Term> = BTreeMap::new();
    let mut class_term = |i: usize, rep: &BTreeMap<usize, Term>| -> Term {
        let r = cl.find(i);
        if let Some(t) = rep.get(&r) {
            return t.clone();
        }
        let k = fresh.len() as u32;
        fresh.entry(r).or_insert_with(|| Term::Aux(next_aux + k, cl.sort_of(r))).clone()
    };

    // monotonicity part over rational classes
    let mut order_cube: Cube = Vec::new();
    for &(a, b, strict) in &cl.order {
        let (ta, tb) = (class_term(a, &rep), class_term(b, &rep));
        order_cube.push(if strict { Literal::lt(ta, tb) } else { Literal::le(ta, tb) });
    }
    for &(a, b) in &cl.diseqs {
        let (ra, rb) = (cl.find(a), cl.find(b));
        match (rep.get(&ra), rep.get(&rb)) {
            (Some(x), Some(y)) => lits.push(Literal::neq(x.clone(), y.clone())),
            _ if is_rational(a) => {
                let (ta, tb) = (class_term(a, &rep), class_term(b, &rep));
                order_cube.push(Literal::neq(ta, tb));
            }
            // a fresh element differs from everything
            _ => {}
        }
    }

    // predicates
    let named = |args: &[usize], rep: &BTreeMap<usize, Term>| -> Option<Vec<Term>> {
        args.iter().map(|&a| rep.get(&cl.find(a)).cloned()).collect()
    };
    for (p, args, pos) in &cl.preds {
        if let Some(ts) = named(args, &rep) {
            lits.push(Literal::new(crate::logic::term::Atom::Pred(*p, ts), *pos));
        }
    }
    for (p, a1, pos1) in &cl.preds {
        for (q, a2, pos2) in &cl.preds {
            if p != q || !pos1 || *pos2 {
                continue;
            }
            if named(a1, &rep).is_some() && named(a2, &rep).is_some() {
                continue; // entailed by the two projected literals
            }
            let mut disjuncts = Vec::new();
            let mut free = false;
            for (&x, &y) in a1.iter().zip(a2) {
                let (rx, ry) = (cl.find(x), cl.find(y));
                if rx == ry {
                    continue;
                }
                match (rep.get(&rx), rep.get(&ry)) {
                    (Some(s), Some(t)) => disjuncts.push(Formula::lit(Literal::neq(s.clone(), t.clone()))),
                    _ => free = true,
                }
            }
            if !free {
                clauses.push(Formula::or(disjuncts));
            }
        }
    }

    let aux: Vec<Term> = fresh.values().cloned().collect();
    let arithmetic = qe_mc(sig, &aux, &order_cube, deadline)?;
    let mut parts = vec![Formula::cube(lits), arithmetic];
    parts.extend(clauses);
    Ok(Formula::and(parts))
}
