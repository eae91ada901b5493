//! Temporal properties in negation normal form.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::formula::Formula;
use super::signature::Signature;
use super::term::{Literal, Named};

/// A data-LTLf property. First-order leaves are single literals, so every
/// leaf is one constraint of the property or the negation of one.
///
/// Use the smart constructors; they keep conjunctions and disjunctions
/// flattened, sorted and free of units, so the derived equality identifies
/// automaton states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Property {
    True,
    False,
    Lit(Literal),
    And(Vec<Property>),
    Or(Vec<Property>),
    /// Strong next: there is a next instant and it satisfies the operand.
    Next(Box<Property>),
    /// Weak next: the current instant is last, or the next one satisfies the operand.
    WeakNext(Box<Property>),
    Until(Box<Property>, Box<Property>),
    Release(Box<Property>, Box<Property>),
}

impl Property {
    pub fn lit(l: Literal) -> Property {
        match l.trivial_value() {
            Some(true) => Property::True,
            Some(false) => Property::False,
            None => Property::Lit(l),
        }
    }

    pub fn and(parts: impl IntoIterator<Item = Property>) -> Property {
        let mut set = BTreeSet::new();
        for p in parts {
            match p {
                Property::True => {}
                Property::False => return Property::False,
                Property::And(inner) => set.extend(inner),
                other => {
                    set.insert(other);
                }
            }
        }
        let set = absorb(set, |p| match p {
            Property::Or(inner) => Some(inner),
            _ => None,
        });
        match set.len() {
            0 => Property::True,
            1 => set.into_iter().next().unwrap(),
            _ => Property::And(set.into_iter().collect()),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Property>) -> Property {
        let mut set = BTreeSet::new();
        for p in parts {
            match p {
                Property::False => {}
                Property::True => return Property::True,
                Property::Or(inner) => set.extend(inner),
                other => {
                    set.insert(other);
                }
            }
        }
        let set = absorb(set, |p| match p {
            Property::And(inner) => Some(inner),
            _ => None,
        });
        match set.len() {
            0 => Property::False,
            1 => set.into_iter().next().unwrap(),
            _ => Property::Or(set.into_iter().collect()),
        }
    }

    pub fn next(p: Property) -> Property {
        Property::Next(Box::new(p))
    }

    pub fn weak_next(p: Property) -> Property {
        Property::WeakNext(Box::new(p))
    }

    pub fn until(a: Property, b: Property) -> Property {
        Property::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Property, b: Property) -> Property {
        Property::Release(Box::new(a), Box::new(b))
    }

    /// `F p` as `true U p`.
    pub fn eventually(p: Property) -> Property {
        Property::until(Property::True, p)
    }

    /// `G p` as `false R p`.
    pub fn always(p: Property) -> Property {
        Property::release(Property::False, p)
    }

    pub fn implies(a: Property, b: Property) -> Property {
        Property::or([a.negate(), b])
    }

    /// Negation pushed to the literals.
    pub fn negate(&self) -> Property {
        match self {
            Property::True => Property::False,
            Property::False => Property::True,
            Property::Lit(l) => Property::lit(l.negate()),
            Property::And(ps) => Property::or(ps.iter().map(Property::negate)),
            Property::Or(ps) => Property::and(ps.iter().map(Property::negate)),
            Property::Next(p) => Property::weak_next(p.negate()),
            Property::WeakNext(p) => Property::next(p.negate()),
            Property::Until(a, b) => Property::release(a.negate(), b.negate()),
            Property::Release(a, b) => Property::until(a.negate(), b.negate()),
        }
    }

    pub fn children(&self) -> Vec<&Property> {
        match self {
            Property::True | Property::False | Property::Lit(_) => Vec::new(),
            Property::And(ps) | Property::Or(ps) => ps.iter().collect(),
            Property::Next(p) | Property::WeakNext(p) => vec![p],
            Property::Until(a, b) | Property::Release(a, b) => vec![a, b],
        }
    }

    pub fn visit_literals(&self, f: &mut impl FnMut(&Literal)) {
        if let Property::Lit(l) = self {
            f(l);
        }
        for c in self.children() {
            c.visit_literals(f);
        }
    }

    /// The constraint set with negations: every literal of the property
    /// together with its complement, deduplicated.
    pub fn constraints(&self) -> BTreeSet<Literal> {
        let mut out = BTreeSet::new();
        self.visit_literals(&mut |l| {
            out.insert(l.clone());
            out.insert(l.negate());
        });
        out
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Nesting depth of temporal operators.
    pub fn temporal_depth(&self) -> usize {
        let inner = self.children().iter().map(|c| c.temporal_depth()).max().unwrap_or(0);
        match self {
            Property::Next(_) | Property::WeakNext(_) | Property::Until(..) | Property::Release(..) => inner + 1,
            _ => inner,
        }
    }

    pub fn has_prev(&self) -> bool {
        let mut found = false;
        self.visit_literals(&mut |l| found |= l.has_prev());
        found
    }

    pub fn is_temporal(&self) -> bool {
        match self {
            Property::Next(_) | Property::WeakNext(_) | Property::Until(..) | Property::Release(..) => true,
            _ => self.children().iter().any(|c| c.is_temporal()),
        }
    }

    /// The equivalent state constraint when the property has no temporal operator.
    pub fn as_formula(&self) -> Option<Formula> {
        match self {
            Property::True => Some(Formula::True),
            Property::False => Some(Formula::False),
            Property::Lit(l) => Some(Formula::lit(l.clone())),
            Property::And(ps) => ps.iter().map(|p| p.as_formula()).collect::<Option<Vec<_>>>().map(Formula::and),
            Property::Or(ps) => ps.iter().map(|p| p.as_formula()).collect::<Option<Vec<_>>>().map(Formula::or),
            _ => None,
        }
    }

    /// Embed a state constraint as a property.
    pub fn from_formula(f: &Formula) -> Property {
        match f {
            Formula::True => Property::True,
            Formula::False => Property::False,
            Formula::Lit(l) => Property::lit(l.clone()),
            Formula::And(fs) => Property::and(fs.iter().map(Property::from_formula)),
            Formula::Or(fs) => Property::or(fs.iter().map(Property::from_formula)),
        }
    }

    /// Disjunctive normal form over the non-boolean subformulas, with
    /// absorption applied.
    pub fn dnf(&self) -> Property {
        Property::or(dnf_clauses(self).into_iter().map(Property::and))
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> Named<'a, Property> {
        Named { sig, item: self }
    }
}

fn dnf_clauses(p: &Property) -> Vec<BTreeSet<Property>> {
    match p {
        Property::True => vec![BTreeSet::new()],
        Property::False => vec![],
        Property::Or(ps) => ps.iter().flat_map(dnf_clauses).collect(),
        Property::And(ps) => {
            let mut acc = vec![BTreeSet::new()];
            for q in ps {
                let rhs = dnf_clauses(q);
                let mut next: Vec<BTreeSet<Property>> = Vec::new();
                for a in &acc {
                    for b in &rhs {
                        let c: BTreeSet<Property> = a.union(b).cloned().collect();
                        if !next.iter().any(|n| n.is_subset(&c)) {
                            next.retain(|n| !c.is_subset(n));
                            next.push(c);
                        }
                    }
                }
                acc = next;
            }
            acc
        }
        other => vec![BTreeSet::from([other.clone()])],
    }
}

/// Absorption: drops an operand whose members (as seen by `parts`) include
/// all members of another operand.
fn absorb(set: BTreeSet<Property>, parts: impl Fn(&Property) -> Option<&Vec<Property>>) -> BTreeSet<Property> {
    let members = |p: &Property| parts(p).cloned().unwrap_or_else(|| vec![p.clone()]);
    let all: Vec<(Property, Vec<Property>)> = set.into_iter().map(|p| (members(&p), p)).map(|(m, p)| (p, m)).collect();
    all.iter()
        .filter(|(p, m)| !all.iter().any(|(q, n)| q != p && n.iter().all(|x| m.contains(x))))
        .map(|(p, _)| p.clone())
        .collect()
}

impl fmt::Display for Named<'_, Property> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = self.sig;
        let show = |p: &Property| p.display(sig).to_string();
        match self.item {
            Property::True => write!(f, "true"),
            Property::False => write!(f, "false"),
            Property::Lit(l) => write!(f, "{}", l.display(sig)),
            Property::And(ps) | Property::Or(ps) => {
                let op = if matches!(self.item, Property::And(_)) { "and" } else { "or" };
                write!(f, "({op}")?;
                for p in ps {
                    write!(f, " {}", show(p))?;
                }
                write!(f, ")")
            }
            Property::Next(p) => write!(f, "(X {})", show(p)),
            Property::WeakNext(p) => write!(f, "(Xw {})", show(p)),
            Property::Until(a, b) => write!(f, "(U {} {})", show(a), show(b)),
            Property::Release(a, b) => write!(f, "(R {} {})", show(a), show(b)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::signature::SortKind;
    use crate::logic::term::Term;

    #[test]
    fn units_absorbed() {
        let mut sig = Signature::new();
        let s = sig.add_sort("S", SortKind::Uninterpreted).unwrap();
        let x = Term::Var(sig.add_variable("x", s).unwrap());
        let a = Term::constant(sig.add_constant("a", s).unwrap());
        let c = Property::lit(Literal::eq(x, a));
        assert_eq!(Property::and([Property::True, c.clone()]), c);
        assert_eq!(Property::or([Property::False, c.clone()]), c);
        assert_eq!(Property::and([Property::False, c.clone()]), Property::False);
        assert_eq!(Property::or([Property::True, c.clone()]), Property::True);
        assert_eq!(c.constraints().len(), 2);
        assert!(Property::True.constraints().is_empty());
    }

    #[test]
    fn negation_dualises_temporal_operators() {
        let p = Property::until(Property::True, Property::next(Property::False));
        assert_eq!(p.negate(), Property::release(Property::False, Property::weak_next(Property::True)));
        assert_eq!(p.negate().negate(), p);
    }
}
