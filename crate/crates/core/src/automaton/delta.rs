//! One-step expansion of a property into (successor, label) pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::logic::property::Property;
use crate::theory::Theory;

use super::symbol::{LastMarker, Symbol};

pub type Expansion = BTreeSet<(Property, Symbol)>;

/// Computes and caches expansions. With a theory attached, labels whose
/// constraints are jointly unsatisfiable are pruned; a backend that cannot
/// decide a label leaves it in place.
pub struct Delta<'t> {
    theory: Option<&'t mut dyn Theory>,
    cache: HashMap<Property, Expansion>,
    sat: HashMap<Symbol, bool>,
}

impl<'t> Delta<'t> {
    pub fn new(theory: Option<&'t mut dyn Theory>) -> Self {
        Delta { theory, cache: HashMap::new(), sat: HashMap::new() }
    }

    fn satisfiable(&mut self, s: &Symbol) -> bool {
        if s.lits.len() < 2 {
            return true;
        }
        let key = s.without_marker();
        if let Some(&b) = self.sat.get(&key) {
            return b;
        }
        let b = match self.theory.as_deref_mut() {
            Some(th) => th.is_satisfiable(&s.formula()).unwrap_or(true),
            None => true,
        };
        self.sat.insert(key, b);
        b
    }

    fn product(&mut self, r1: &Expansion, r2: &Expansion, conj: bool) -> Expansion {
        let mut out = Expansion::new();
        for (p1, s1) in r1 {
            for (p2, s2) in r2 {
                let Some(s) = s1.union(s2) else { continue };
                if !self.satisfiable(&s) {
                    continue;
                }
                let p = if conj {
                    Property::and([p1.clone(), p2.clone()])
                } else {
                    Property::or([p1.clone(), p2.clone()])
                };
                out.insert((p, s));
            }
        }
        merge_labels(out)
    }

    pub fn expand(&mut self, p: &Property) -> Expansion {
        if let Some(r) = self.cache.get(p) {
            return r.clone();
        }
        let r = match p {
            Property::True => Expansion::from([(Property::True, Symbol::empty())]),
            Property::False => Expansion::from([(Property::False, Symbol::empty())]),
            Property::Lit(l) => Expansion::from([
                (Property::True, Symbol::literal(l.clone())),
                (Property::False, Symbol::literal(l.negate())),
            ]),
            Property::And(ps) | Property::Or(ps) => {
                let conj = matches!(p, Property::And(_));
                let mut acc = self.expand(&ps[0]);
                for q in &ps[1..] {
                    let next = self.expand(q);
                    acc = self.product(&acc, &next, conj);
                }
                acc
            }
            Property::Next(q) => Expansion::from([
                ((**q).clone(), Symbol::marker(LastMarker::NotLast)),
                (Property::False, Symbol::marker(LastMarker::Last)),
            ]),
            Property::WeakNext(q) => Expansion::from([
                ((**q).clone(), Symbol::marker(LastMarker::NotLast)),
                (Property::True, Symbol::marker(LastMarker::Last)),
            ]),
            Property::Until(a, b) => {
                let (ea, ex) = (self.expand(a), self.expand(&Property::next(p.clone())));
                let step = self.product(&ea, &ex, true);
                let now = self.expand(b);
                self.product(&now, &step, false)
            }
            Property::Release(a, b) => {
                let (ea, ex) = (self.expand(a), self.expand(&Property::weak_next(p.clone())));
                let step = self.product(&ea, &ex, false);
                let now = self.expand(b);
                self.product(&now, &step, true)
            }
        };
        self.cache.insert(p.clone(), r.clone());
        r
    }
}

/// Pairs sharing a label collapse to one pair whose successor is the
/// disjunction of theirs.
fn merge_labels(r: Expansion) -> Expansion {
    let mut by_label: BTreeMap<Symbol, Vec<Property>> = BTreeMap::new();
    for (p, s) in r {
        by_label.entry(s).or_default().push(p);
    }
    by_label.into_iter().map(|(s, ps)| (Property::or(ps), s)).collect()
}

/// The expansion of `p` without theory pruning.
pub fn delta(p: &Property) -> Expansion {
    Delta::new(None).expand(p)
}
