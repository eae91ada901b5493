//! Terms, atoms and literals of the quantifier-free first-order layer.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::signature::{FunId, PredId, Signature, SortId, VarId};

/// A first-order term.
///
/// The derived order doubles as the representative preference of the theory
/// engine: interpreted values first, then variables, then applications.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    /// Numeric literal of an arithmetic sort.
    Num(BigRational, SortId),
    /// A named domain element; distinct names denote distinct elements.
    Elem(String, SortId),
    /// Current value of a state variable.
    Var(VarId),
    /// Value of a state variable at the previous instant.
    Prev(VarId),
    /// Auxiliary (fresh or quantified) variable.
    Aux(u32, SortId),
    App(FunId, Vec<Term>),
    Add(Vec<Term>),
    Scale(BigRational, Box<Term>),
}

impl Term {
    pub fn app(f: FunId, args: Vec<Term>) -> Term {
        Term::App(f, args)
    }

    pub fn constant(f: FunId) -> Term {
        Term::App(f, Vec::new())
    }

    pub fn int(v: i64, sort: SortId) -> Term {
        Term::Num(BigRational::from_integer(v.into()), sort)
    }

    pub fn sort(&self, sig: &Signature) -> SortId {
        match self {
            Term::Num(_, s) | Term::Elem(_, s) | Term::Aux(_, s) => *s,
            Term::Var(v) | Term::Prev(v) => sig.var_sort(*v),
            Term::App(f, _) => sig.function(*f).result,
            Term::Add(ts) => ts[0].sort(sig),
            Term::Scale(_, t) => t.sort(sig),
        }
    }

    /// Variable-like leaves: state variables, lookback variables, auxiliaries.
    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Var(_) | Term::Prev(_) | Term::Aux(..))
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Term::Num(..) | Term::Elem(..))
    }

    pub fn children(&self) -> &[Term] {
        match self {
            Term::App(_, a) | Term::Add(a) => a,
            Term::Scale(_, t) => std::slice::from_ref(t),
            _ => &[],
        }
    }

    pub fn any(&self, pred: &mut impl FnMut(&Term) -> bool) -> bool {
        pred(self) || self.children().iter().any(|c| c.any(pred))
    }

    pub fn has_prev(&self) -> bool {
        self.any(&mut |t| matches!(t, Term::Prev(_)))
    }

    pub fn mentions(&self, v: &Term) -> bool {
        self.any(&mut |t| t == v)
    }

    /// True when the term uses linear-arithmetic operators.
    pub fn is_arithmetic_compound(&self) -> bool {
        self.any(&mut |t| matches!(t, Term::Add(_) | Term::Scale(..)))
    }

    pub fn collect_variables(&self, out: &mut Vec<Term>) {
        if self.is_variable() {
            if !out.contains(self) {
                out.push(self.clone());
            }
        } else {
            for c in self.children() {
                c.collect_variables(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Term::size).sum::<usize>()
    }

    /// Bottom-up rewrite; `f` sees every node after its children were rewritten.
    pub fn map(&self, f: &mut impl FnMut(Term) -> Term) -> Term {
        let t = match self {
            Term::App(g, args) => Term::App(*g, args.iter().map(|a| a.map(f)).collect()),
            Term::Add(args) => Term::Add(args.iter().map(|a| a.map(f)).collect()),
            Term::Scale(c, t) => Term::Scale(c.clone(), Box::new(t.map(f))),
            other => other.clone(),
        };
        f(t)
    }

    /// Simultaneous replacement of leaves by the mapping.
    pub fn replace(&self, m: &impl Fn(&Term) -> Option<Term>) -> Term {
        if let Some(t) = m(self) {
            return t;
        }
        match self {
            Term::App(g, args) => Term::App(*g, args.iter().map(|a| a.replace(m)).collect()),
            Term::Add(args) => Term::Add(args.iter().map(|a| a.replace(m)).collect()),
            Term::Scale(c, t) => Term::Scale(c.clone(), Box::new(t.replace(m))),
            other => other.clone(),
        }
    }

    pub fn max_aux(&self) -> Option<u32> {
        match self {
            Term::Aux(i, _) => Some(*i),
            _ => self.children().iter().filter_map(Term::max_aux).max(),
        }
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> Named<'a, Term> {
        Named { sig, item: self }
    }
}

/// An atomic constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Atom {
    Eq(Term, Term),
    Pred(PredId, Vec<Term>),
    Le(Term, Term),
    Lt(Term, Term),
}

impl Atom {
    /// Equality with its sides in canonical order.
    pub fn eq(a: Term, b: Term) -> Atom {
        if a <= b {
            Atom::Eq(a, b)
        } else {
            Atom::Eq(b, a)
        }
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Eq(a, b) | Atom::Le(a, b) | Atom::Lt(a, b) => vec![a, b],
            Atom::Pred(_, args) => args.iter().collect(),
        }
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Atom {
        match self {
            Atom::Eq(a, b) => Atom::eq(f(a), f(b)),
            Atom::Le(a, b) => Atom::Le(f(a), f(b)),
            Atom::Lt(a, b) => Atom::Lt(f(a), f(b)),
            Atom::Pred(p, args) => Atom::Pred(*p, args.iter().map(|t| f(t)).collect()),
        }
    }

    pub fn has_prev(&self) -> bool {
        self.terms().iter().any(|t| t.has_prev())
    }

    pub fn is_order(&self) -> bool {
        matches!(self, Atom::Le(..) | Atom::Lt(..))
    }
}

/// An atom or a negated atom. Negated order atoms are normalised into the
/// dual positive comparison (total orders only).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn new(atom: Atom, positive: bool) -> Literal {
        match (atom, positive) {
            (Atom::Le(a, b), false) => Literal { atom: Atom::Lt(b, a), positive: true },
            (Atom::Lt(a, b), false) => Literal { atom: Atom::Le(b, a), positive: true },
            (Atom::Eq(a, b), p) => Literal { atom: Atom::eq(a, b), positive: p },
            (atom, positive) => Literal { atom, positive },
        }
    }

    pub fn pos(atom: Atom) -> Literal {
        Literal::new(atom, true)
    }

    pub fn neg(atom: Atom) -> Literal {
        Literal::new(atom, false)
    }

    pub fn eq(a: Term, b: Term) -> Literal {
        Literal::pos(Atom::eq(a, b))
    }

    pub fn neq(a: Term, b: Term) -> Literal {
        Literal::neg(Atom::eq(a, b))
    }

    pub fn lt(a: Term, b: Term) -> Literal {
        Literal::pos(Atom::Lt(a, b))
    }

    pub fn le(a: Term, b: Term) -> Literal {
        Literal::pos(Atom::Le(a, b))
    }

    pub fn negate(&self) -> Literal {
        Literal::new(self.atom.clone(), !self.positive)
    }

    pub fn has_prev(&self) -> bool {
        self.atom.has_prev()
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Literal {
        Literal::new(self.atom.map_terms(f), self.positive)
    }

    pub fn replace(&self, m: &impl Fn(&Term) -> Option<Term>) -> Literal {
        self.map_terms(&mut |t| t.replace(m))
    }

    pub fn variables(&self) -> Vec<Term> {
        let mut out = Vec::new();
        for t in self.atom.terms() {
            t.collect_variables(&mut out);
        }
        out
    }

    pub fn mentions(&self, v: &Term) -> bool {
        self.atom.terms().iter().any(|t| t.mentions(v))
    }

    /// Constant-fold literals whose truth is syntactically determined.
    pub fn trivial_value(&self) -> Option<bool> {
        let v = match &self.atom {
            Atom::Eq(a, b) => {
                if a == b {
                    Some(true)
                } else if a.is_value() && b.is_value() {
                    Some(false)
                } else {
                    None
                }
            }
            Atom::Le(a, b) | Atom::Lt(a, b) => {
                let strict = matches!(self.atom, Atom::Lt(..));
                if a == b {
                    Some(!strict)
                } else if let (Term::Num(x, _), Term::Num(y, _)) = (a, b) {
                    Some(if strict { x < y } else { x <= y })
                } else {
                    None
                }
            }
            Atom::Pred(..) => None,
        };
        v.map(|b| b == self.positive)
    }

    pub fn max_aux(&self) -> Option<u32> {
        self.atom.terms().iter().filter_map(|t| t.max_aux()).max()
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> Named<'a, Literal> {
        Named { sig, item: self }
    }
}

/// Pairs an item with the signature needed to print its symbols.
pub struct Named<'a, T> {
    pub sig: &'a Signature,
    pub item: &'a T,
}

pub(crate) fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Named<'_, Term> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = self.sig;
        match self.item {
            Term::Num(r, _) => fmt_rational(r, f),
            Term::Elem(name, _) => write!(f, "@{name}"),
            Term::Var(v) => write!(f, "{}", sig.variable(*v).name),
            Term::Prev(v) => write!(f, "(prev {})", sig.variable(*v).name),
            Term::Aux(i, _) => write!(f, "?{i}"),
            Term::App(g, args) => {
                let name = &sig.function(*g).name;
                if args.is_empty() {
                    write!(f, "{name}")
                } else {
                    write!(f, "({name}")?;
                    for a in args {
                        write!(f, " {}", a.display(sig))?;
                    }
                    write!(f, ")")
                }
            }
            Term::Add(args) => {
                write!(f, "(+")?;
                for a in args {
                    write!(f, " {}", a.display(sig))?;
                }
                write!(f, ")")
            }
            Term::Scale(c, t) => {
                write!(f, "(* ")?;
                fmt_rational(c, f)?;
                write!(f, " {})", t.display(sig))
            }
        }
    }
}

impl fmt::Display for Named<'_, Atom> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = self.sig;
        match self.item {
            Atom::Eq(a, b) => write!(f, "(= {} {})", a.display(sig), b.display(sig)),
            Atom::Le(a, b) => write!(f, "(<= {} {})", a.display(sig), b.display(sig)),
            Atom::Lt(a, b) => write!(f, "(< {} {})", a.display(sig), b.display(sig)),
            Atom::Pred(p, args) => {
                write!(f, "({}", sig.predicate(*p).name)?;
                for a in args {
                    write!(f, " {}", a.display(sig))?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Named<'_, Literal> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atom = Named { sig: self.sig, item: &self.item.atom };
        if self.item.positive {
            write!(f, "{atom}")
        } else if let Atom::Eq(a, b) = &self.item.atom {
            write!(f, "(distinct {} {})", a.display(self.sig), b.display(self.sig))
        } else {
            write!(f, "(not {atom})")
        }
    }
}

/// Evaluate a linear term over exact rationals when every leaf is a number.
pub fn eval_numeric(t: &Term) -> Option<BigRational> {
    match t {
        Term::Num(r, _) => Some(r.clone()),
        Term::Add(args) => {
            let mut acc = BigRational::zero();
            for a in args {
                acc += eval_numeric(a)?;
            }
            Some(acc)
        }
        Term::Scale(c, t) => Some(c * eval_numeric(t)?),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::signature::SortKind;

    #[test]
    fn negated_order_atoms_flip() {
        let mut sig = Signature::new();
        let r = sig.add_sort("Real", SortKind::Rational).unwrap();
        let x = Term::Var(sig.add_variable("x", r).unwrap());
        let y = Term::Var(sig.add_variable("y", r).unwrap());
        let l = Literal::neg(Atom::Lt(x.clone(), y.clone()));
        assert_eq!(l, Literal::le(y.clone(), x.clone()));
        assert_eq!(l.negate(), Literal::lt(x.clone(), y.clone()));
        assert_eq!(l.negate().negate(), l);
        assert_eq!(Literal::eq(y.clone(), x.clone()), Literal::eq(x, y));
    }

    #[test]
    fn numerals_fold() {
        let mut sig = Signature::new();
        let r = sig.add_sort("Real", SortKind::Rational).unwrap();
        assert_eq!(Literal::lt(Term::int(3, r), Term::int(5, r)).trivial_value(), Some(true));
        assert_eq!(Literal::eq(Term::int(3, r), Term::int(5, r)).trivial_value(), Some(false));
    }
}
