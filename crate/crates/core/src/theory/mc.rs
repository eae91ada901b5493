//! Fourier–Motzkin elimination restricted to monotonicity constraints over
//! a dense order without endpoints.

use crate::logic::formula::{Cube, Formula};
use crate::logic::signature::{Signature, SortKind};
use crate::logic::term::{Atom, Literal, Term};

use super::{Deadline, TheoryError};

/// True when the literal compares two terms without arithmetic operators.
pub fn is_mc_literal(l: &Literal) -> bool {
    matches!(l.atom, Atom::Eq(..) | Atom::Le(..) | Atom::Lt(..))
        && l.atom.terms().iter().all(|t| !t.is_arithmetic_compound())
}

/// Eliminate `ys` from a conjunction of monotonicity constraints over a
/// dense order. Every `y` may only occur as a whole side of a literal.
pub fn qe_mc(sig: &Signature, ys: &[Term], cube: &[Literal], deadline: &Deadline) -> Result<Formula, TheoryError> {
    for l in cube {
        if !is_mc_literal(l) {
            return Err(TheoryError::Unsupported(format!(
                "`{}` is not a monotonicity constraint",
                l.display(sig)
            )));
        }
        for t in l.atom.terms() {
            for y in ys {
                if t != y && t.mentions(y) {
                    return Err(TheoryError::Unsupported(format!(
                        "eliminated variable `{}` occurs below a function in `{}`",
                        y.display(sig),
                        l.display(sig)
                    )));
                }
            }
        }
    }
    for y in ys {
        let k = sig.sort_kind(y.sort(sig));
        if k == SortKind::Integer {
            return Err(TheoryError::Unsupported("elimination over a discrete order".into()));
        }
    }
    let mut out = Vec::new();
    eliminate(cube.to_vec(), ys, deadline, &mut out)?;
    Ok(Formula::from_cubes(out))
}

fn fold(cube: Cube) -> Option<Cube> {
    let mut out = Vec::with_capacity(cube.len());
    for l in cube {
        match l.trivial_value() {
            Some(true) => {}
            Some(false) => return None,
            None => {
                if !out.contains(&l) {
                    out.push(l);
                }
            }
        }
    }
    Some(out)
}

fn eliminate(cube: Cube, ys: &[Term], deadline: &Deadline, out: &mut Vec<Cube>) -> Result<(), TheoryError> {
    deadline.check()?;
    let Some(cube) = fold(cube) else {
        return Ok(());
    };
    let Some((y, rest)) = ys.split_first() else {
        out.push(cube);
        return Ok(());
    };
    if !cube.iter().any(|l| l.mentions(y)) {
        return eliminate(cube, rest, deadline, out);
    }
    // equality y = t: substitute
    for l in &cube {
        if let (Atom::Eq(a, b), true) = (&l.atom, l.positive) {
            let t = if a == y { b } else if b == y { a } else { continue };
            let next: Cube = cube.iter().map(|m| m.replace(&|s: &Term| (s == y).then(|| t.clone()))).collect();
            return eliminate(next, rest, deadline, out);
        }
    }
    let mut lowers: Vec<(Term, bool)> = Vec::new();
    let mut uppers: Vec<(Term, bool)> = Vec::new();
    let mut neqs: Vec<Term> = Vec::new();
    let mut others: Cube = Vec::new();
    for l in &cube {
        if !l.mentions(y) {
            others.push(l.clone());
            continue;
        }
        match &l.atom {
            Atom::Eq(a, b) => neqs.push(if a == y { b.clone() } else { a.clone() }),
            Atom::Lt(a, b) | Atom::Le(a, b) => {
                let strict = matches!(l.atom, Atom::Lt(..));
                if a == y {
                    uppers.push((b.clone(), strict));
                } else {
                    lowers.push((a.clone(), strict));
                }
            }
            Atom::Pred(..) => unreachable!("checked by is_mc_literal"),
        }
    }
    let weak_pair = lowers.iter().any(|(_, s)| !s) && uppers.iter().any(|(_, s)| !s);
    if weak_pair {
        if let Some(t) = neqs.first() {
            // y != t  ==>  y < t  or  t < y
            let neq = Literal::neq(y.clone(), t.clone());
            let base: Cube = cube.iter().filter(|l| **l != neq).cloned().collect();
            let mut below = base.clone();
            below.push(Literal::lt(y.clone(), t.clone()));
            eliminate(below, ys, deadline, out)?;
            let mut above = base;
            above.push(Literal::lt(t.clone(), y.clone()));
            return eliminate(above, ys, deadline, out);
        }
    }
    // Without a weak lower/upper pair the interval for y is open or
    // unbounded on one side, so finitely many disequalities never block it.
    for (l, sl) in &lowers {
        for (u, su) in &uppers {
            others.push(if *sl || *su { Literal::lt(l.clone(), u.clone()) } else { Literal::le(l.clone(), u.clone()) });
        }
    }
    eliminate(others, rest, deadline, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::{parse_formula, parse_signature};

    fn setup() -> Signature {
        parse_signature("(sort Real :rational) (var x Real) (var y Real) (var z Real) (var w Real)").unwrap()
    }

    fn run(sig: &Signature, y: &str, f: &str) -> Formula {
        let cube = parse_formula(f, sig).unwrap().dnf().pop().unwrap();
        let y = Term::Var(sig.var_by_name(y).unwrap());
        qe_mc(sig, &[y], &cube, &Deadline::none()).unwrap()
    }

    #[test]
    fn interval_collapses() {
        let sig = setup();
        assert_eq!(run(&sig, "y", "(and (< x y) (< y z))"), parse_formula("(< x z)", &sig).unwrap());
        assert_eq!(run(&sig, "y", "(and (<= x y) (<= y x))"), Formula::True);
        assert_eq!(run(&sig, "y", "(< y x)"), Formula::True);
    }

    #[test]
    fn disequality_on_open_interval_dropped() {
        let sig = setup();
        let r = run(&sig, "y", "(and (< x y) (< y z) (distinct y w))");
        assert_eq!(r, parse_formula("(< x z)", &sig).unwrap());
    }

    #[test]
    fn disequality_on_closed_interval_splits() {
        let sig = setup();
        let r = run(&sig, "y", "(and (<= x y) (<= y z) (distinct y w))");
        // x < z, or x = z != w
        let cubes = r.dnf();
        assert!(cubes.len() >= 2);
    }
}
