//! Congruence closure combined with a dense-order constraint graph.
//!
//! Decides conjunctions of literals over equality, uninterpreted functions
//! and predicates, and `<`/`<=` between rational-sorted terms. Order
//! cycles merge classes and merged classes feed congruence again until
//! nothing changes.

use std::collections::{BTreeMap, HashMap};

use crate::logic::signature::{FunId, PredId, Signature, SortId, SortKind};
use crate::logic::term::{Atom, Literal, Term};

use super::{Deadline, TheoryError};

#[derive(Debug, Clone)]
pub(crate) struct Closure<'s> {
    sig: &'s Signature,
    pub terms: Vec<Term>,
    index: HashMap<Term, usize>,
    head: Vec<Option<FunId>>,
    pub kids: Vec<Vec<usize>>,
    parent: Vec<usize>,
    pub diseqs: Vec<(usize, usize)>,
    pub preds: Vec<(PredId, Vec<usize>, bool)>,
    /// `(a, b, strict)` for `a < b` or `a <= b`.
    pub order: Vec<(usize, usize, bool)>,
    equalities: Vec<(usize, usize)>,
}

impl<'s> Closure<'s> {
    pub fn new(sig: &'s Signature) -> Self {
        Closure {
            sig,
            terms: Vec::new(),
            index: HashMap::new(),
            head: Vec::new(),
            kids: Vec::new(),
            parent: Vec::new(),
            diseqs: Vec::new(),
            preds: Vec::new(),
            order: Vec::new(),
            equalities: Vec::new(),
        }
    }

    pub fn sort_of(&self, n: usize) -> SortId {
        self.terms[n].sort(self.sig)
    }

    pub fn add_term(&mut self, t: &Term) -> Result<usize, TheoryError> {
        if let Some(&i) = self.index.get(t) {
            return Ok(i);
        }
        let (head, kids) = match t {
            Term::App(f, args) => {
                let mut ks = Vec::with_capacity(args.len());
                for a in args {
                    ks.push(self.add_term(a)?);
                }
                (Some(*f), ks)
            }
            Term::Add(_) | Term::Scale(..) => {
                return Err(TheoryError::Unsupported(format!(
                    "linear arithmetic term `{}` outside monotonicity constraints",
                    t.display(self.sig)
                )))
            }
            _ => (None, Vec::new()),
        };
        let i = self.terms.len();
        self.terms.push(t.clone());
        self.index.insert(t.clone(), i);
        self.head.push(head);
        self.kids.push(kids);
        self.parent.push(i);
        Ok(i)
    }

    pub fn add_literal(&mut self, l: &Literal) -> Result<(), TheoryError> {
        match &l.atom {
            Atom::Eq(a, b) => {
                let (x, y) = (self.add_term(a)?, self.add_term(b)?);
                if l.positive {
                    self.equalities.push((x, y));
                } else {
                    self.diseqs.push((x, y));
                }
            }
            Atom::Pred(p, args) => {
                let mut ids = Vec::with_capacity(args.len());
                for a in args {
                    ids.push(self.add_term(a)?);
                }
                self.preds.push((*p, ids, l.positive));
            }
            Atom::Le(a, b) | Atom::Lt(a, b) => {
                debug_assert!(l.positive, "order literals are normalised to positive form");
                let s = a.sort(self.sig);
                if self.sig.sort_kind(s) != SortKind::Rational {
                    return Err(TheoryError::Unsupported(format!(
                        "order constraint over non-dense sort `{}`",
                        self.sig.sort(s).name
                    )));
                }
                let (x, y) = (self.add_term(a)?, self.add_term(b)?);
                self.order.push((x, y, matches!(l.atom, Atom::Lt(..))));
            }
        }
        Ok(())
    }

    pub fn find(&self, mut n: usize) -> usize {
        while self.parent[n] != n {
            n = self.parent[n];
        }
        n
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    fn congruence(&mut self) -> bool {
        let mut changed = false;
        loop {
            let mut table: HashMap<(FunId, Vec<usize>), usize> = HashMap::new();
            let mut merges = Vec::new();
            for n in 0..self.terms.len() {
                if let Some(f) = self.head[n] {
                    let key = (f, self.kids[n].iter().map(|&k| self.find(k)).collect::<Vec<_>>());
                    match table.get(&key) {
                        Some(&m) => merges.push((m, n)),
                        None => {
                            table.insert(key, n);
                        }
                    }
                }
            }
            let mut any = false;
            for (a, b) in merges {
                any |= self.union(a, b);
            }
            if !any {
                return changed;
            }
            changed = true;
        }
    }

    /// Distinct interpreted values in one class.
    fn value_clash(&self) -> bool {
        let mut seen: HashMap<usize, &Term> = HashMap::new();
        for (n, t) in self.terms.iter().enumerate() {
            if t.is_value() {
                let r = self.find(n);
                match seen.get(&r) {
                    Some(other) if *other != t => return true,
                    _ => {
                        seen.insert(r, t);
                    }
                }
            }
        }
        false
    }

    /// Order edges between classes, including the fixed order of numerals.
    fn order_edges(&self) -> Vec<(usize, usize, bool)> {
        let mut edges: Vec<(usize, usize, bool)> =
            self.order.iter().map(|&(a, b, s)| (self.find(a), self.find(b), s)).collect();
        let mut nums: BTreeMap<(SortId, &num_rational::BigRational), usize> = BTreeMap::new();
        for (n, t) in self.terms.iter().enumerate() {
            if let Term::Num(r, s) = t {
                if self.sig.sort_kind(*s) == SortKind::Rational {
                    nums.insert((*s, r), self.find(n));
                }
            }
        }
        let ordered: Vec<_> = nums.into_iter().collect();
        for w in ordered.windows(2) {
            if w[0].0 .0 == w[1].0 .0 {
                edges.push((w[0].1, w[1].1, true));
            }
        }
        edges
    }

    /// Saturate. Returns false when the literals are unsatisfiable.
    pub fn saturate(&mut self, deadline: &Deadline) -> Result<bool, TheoryError> {
        for (a, b) in std::mem::take(&mut self.equalities) {
            self.union(a, b);
        }
        loop {
            deadline.check()?;
            self.congruence();
            if self.value_clash() {
                return Ok(false);
            }
            let edges = self.order_edges();
            if edges.is_empty() {
                break;
            }
            let comp = scc(self.terms.len(), &edges);
            if edges.iter().any(|&(a, b, strict)| strict && comp[a] == comp[b]) {
                return Ok(false);
            }
            let mut merged = false;
            let mut first: HashMap<usize, usize> = HashMap::new();
            for &(a, b, _) in &edges {
                for n in [a, b] {
                    match first.get(&comp[n]) {
                        Some(&m) => merged |= self.union(m, n),
                        None => {
                            first.insert(comp[n], n);
                        }
                    }
                }
            }
            if !merged {
                break;
            }
        }
        if self.diseqs.iter().any(|&(a, b)| self.find(a) == self.find(b)) {
            return Ok(false);
        }
        let mut polarity: HashMap<(PredId, Vec<usize>), bool> = HashMap::new();
        for (p, args, pos) in &self.preds {
            let key = (*p, args.iter().map(|&a| self.find(a)).collect());
            match polarity.get(&key) {
                Some(&old) if old != *pos => return Ok(false),
                _ => {
                    polarity.insert(key, *pos);
                }
            }
        }
        Ok(true)
    }
}

/// Strongly connected components (Tarjan) over nodes `0..n`.
fn scc(n: usize, edges: &[(usize, usize, bool)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b, _) in edges {
        adj[a].push(b);
    }
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // iterative DFS: (node, next child position)
        let mut work = vec![(root, 0usize)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = work.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(u, _)) = work.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_finds_cycle() {
        let comp = scc(4, &[(0, 1, false), (1, 2, false), (2, 0, true), (2, 3, false)]);
        assert_eq!(comp[0], comp[1]);
        assert_eq!(comp[1], comp[2]);
        assert_ne!(comp[2], comp[3]);
    }
}
