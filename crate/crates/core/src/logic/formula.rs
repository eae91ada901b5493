//! Quantifier-free state constraints in negation normal form.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::signature::Signature;
use super::term::{Literal, Named, Term};

/// A quantifier-free formula. Values built through [`Formula::and`] and
/// [`Formula::or`] are flattened, sorted and deduplicated, so structural
/// equality is the canonical key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    Lit(Literal),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

/// A conjunction of literals.
pub type Cube = Vec<Literal>;

impl Formula {
    pub fn lit(l: Literal) -> Formula {
        match l.trivial_value() {
            Some(true) => Formula::True,
            Some(false) => Formula::False,
            None => Formula::Lit(l),
        }
    }

    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut set = BTreeSet::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => set.extend(inner),
                other => {
                    set.insert(other);
                }
            }
        }
        // complementary literals
        for f in &set {
            if let Formula::Lit(l) = f {
                if set.contains(&Formula::Lit(l.negate())) {
                    return Formula::False;
                }
            }
        }
        match set.len() {
            0 => Formula::True,
            1 => set.into_iter().next().unwrap(),
            _ => Formula::And(set.into_iter().collect()),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut set = BTreeSet::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => set.extend(inner),
                other => {
                    set.insert(other);
                }
            }
        }
        for f in &set {
            if let Formula::Lit(l) = f {
                if set.contains(&Formula::Lit(l.negate())) {
                    return Formula::True;
                }
            }
        }
        match set.len() {
            0 => Formula::False,
            1 => set.into_iter().next().unwrap(),
            _ => Formula::Or(set.into_iter().collect()),
        }
    }

    pub fn cube(lits: impl IntoIterator<Item = Literal>) -> Formula {
        Formula::and(lits.into_iter().map(Formula::lit))
    }

    /// Disjunction of cubes, dropping cubes subsumed by a smaller one.
    pub fn from_cubes(cubes: impl IntoIterator<Item = Cube>) -> Formula {
        let mut sets: Vec<BTreeSet<Literal>> = Vec::new();
        for c in cubes {
            let f = Formula::cube(c);
            match f {
                Formula::False => continue,
                Formula::True => return Formula::True,
                _ => {}
            }
            let set: BTreeSet<Literal> = f.literals().into_iter().collect();
            sets.push(set);
        }
        sets.sort_by_key(|s| s.len());
        let mut kept: Vec<BTreeSet<Literal>> = Vec::new();
        for s in sets {
            if kept.iter().any(|k| k.is_subset(&s)) {
                continue;
            }
            kept.push(s);
        }
        Formula::or(kept.into_iter().map(Formula::cube))
    }

    pub fn negate(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Lit(l) => Formula::lit(l.negate()),
            Formula::And(fs) => Formula::or(fs.iter().map(Formula::negate)),
            Formula::Or(fs) => Formula::and(fs.iter().map(Formula::negate)),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    /// All literals occurring in the formula.
    pub fn literals(&self) -> Vec<Literal> {
        let mut out = Vec::new();
        self.visit_literals(&mut |l| out.push(l.clone()));
        out
    }

    pub fn visit_literals(&self, f: &mut impl FnMut(&Literal)) {
        match self {
            Formula::Lit(l) => f(l),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.visit_literals(f)),
            _ => {}
        }
    }

    pub fn any_literal(&self, pred: &mut impl FnMut(&Literal) -> bool) -> bool {
        match self {
            Formula::Lit(l) => pred(l),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|g| g.any_literal(pred)),
            _ => false,
        }
    }

    pub fn has_prev(&self) -> bool {
        self.any_literal(&mut |l| l.has_prev())
    }

    pub fn mentions(&self, v: &Term) -> bool {
        self.any_literal(&mut |l| l.mentions(v))
    }

    pub fn map_literals(&self, f: &mut impl FnMut(&Literal) -> Formula) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Lit(l) => f(l),
            Formula::And(fs) => Formula::and(fs.iter().map(|g| g.map_literals(f)).collect::<Vec<_>>()),
            Formula::Or(fs) => Formula::or(fs.iter().map(|g| g.map_literals(f)).collect::<Vec<_>>()),
        }
    }

    /// Simultaneous replacement of leaf terms.
    pub fn replace(&self, m: &impl Fn(&Term) -> Option<Term>) -> Formula {
        self.map_literals(&mut |l| Formula::lit(l.replace(m)))
    }

    pub fn variables(&self) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        self.visit_literals(&mut |l| {
            for v in l.variables() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        });
        out
    }

    pub fn max_aux(&self) -> Option<u32> {
        let mut m = None;
        self.visit_literals(&mut |l| m = m.max(l.max_aux()));
        m
    }

    /// Disjunctive normal form. Cubes with complementary literals are dropped.
    pub fn dnf(&self) -> Vec<Cube> {
        match self {
            Formula::True => vec![Vec::new()],
            Formula::False => Vec::new(),
            Formula::Lit(l) => vec![vec![l.clone()]],
            Formula::Or(fs) => fs.iter().flat_map(|f| f.dnf()).collect(),
            Formula::And(fs) => {
                let mut acc: Vec<Cube> = vec![Vec::new()];
                for f in fs {
                    let d = f.dnf();
                    let mut next = Vec::with_capacity(acc.len() * d.len());
                    for a in &acc {
                        for c in &d {
                            let mut merged = a.clone();
                            for l in c {
                                if !merged.contains(l) {
                                    merged.push(l.clone());
                                }
                            }
                            if !merged.iter().any(|l| merged.contains(&l.negate())) {
                                next.push(merged);
                            }
                        }
                    }
                    acc = next;
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Lit(_) => 1,
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
        }
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> Named<'a, Formula> {
        Named { sig, item: self }
    }
}

impl fmt::Display for Named<'_, Formula> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = self.sig;
        match self.item {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Lit(l) => write!(f, "{}", l.display(sig)),
            Formula::And(fs) | Formula::Or(fs) => {
                let op = if matches!(self.item, Formula::And(_)) { "and" } else { "or" };
                write!(f, "({op}")?;
                for g in fs {
                    write!(f, " {}", g.display(sig))?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::signature::{Signature, SortKind};
    use crate::logic::term::Term;

    fn setup() -> (Signature, Term, Term) {
        let mut sig = Signature::new();
        let s = sig.add_sort("S", SortKind::Uninterpreted).unwrap();
        let x = Term::Var(sig.add_variable("x", s).unwrap());
        let a = Term::constant(sig.add_constant("a", s).unwrap());
        (sig, x, a)
    }

    #[test]
    fn and_is_canonical() {
        let (_, x, a) = setup();
        let p = Formula::lit(Literal::eq(x.clone(), a.clone()));
        let q = Formula::lit(Literal::eq(x.clone(), x.clone()));
        assert_eq!(q, Formula::True);
        let n = Formula::lit(Literal::neq(a.clone(), x.clone()));
        assert_eq!(Formula::and([p.clone(), n.clone()]), Formula::False);
        assert_eq!(Formula::or([p.clone(), n]), Formula::True);
        assert_eq!(Formula::and([p.clone(), p.clone(), Formula::True]), p);
    }

    #[test]
    fn subsumed_cubes_dropped() {
        let (_, x, a) = setup();
        let l1 = Literal::eq(x.clone(), a.clone());
        let l2 = Literal::neq(x.clone(), x.clone());
        let f = Formula::from_cubes(vec![vec![l1.clone()], vec![l1.clone(), Literal::eq(a.clone(), a.clone())]]);
        assert_eq!(f, Formula::lit(l1.clone()));
        assert_eq!(Formula::from_cubes(vec![vec![l2]]), Formula::False);
    }
}
