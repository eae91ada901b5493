//! Computation graphs of label words and a bounded search for words whose
//! constraints chain values across many instants.
//!
//! A node is a copy of a state variable at one position of the word; two
//! copies are adjacent when they occur in a common positive literal, and
//! copies equated by a literal are merged. The length of a path counts the
//! edges joining copies from different positions, so constraints within a
//! single instant are free.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::automaton::{Nfa, Symbol};
use crate::logic::signature::VarId;
use crate::logic::term::{Atom, Term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputationGraph {
    /// Variable copies as (variable, position).
    pub nodes: Vec<(VarId, usize)>,
    /// Undirected edges `(u, v)` with `u < v`.
    pub edges: Vec<(usize, usize)>,
    /// Merged class of every node.
    pub class: Vec<usize>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// The computation graph of a word over `num_vars` state variables.
pub fn computation_graph(word: &[Symbol], num_vars: usize) -> ComputationGraph {
    let n = word.len();
    let nodes: Vec<(VarId, usize)> = (0..n).flat_map(|i| (0..num_vars).map(move |v| (VarId(v as u32), i))).collect();
    let id = |v: VarId, i: usize| i * num_vars + v.0 as usize;
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    let mut edges = Vec::new();
    for (i, s) in word.iter().enumerate() {
        for l in &s.lits {
            if !l.positive {
                continue;
            }
            let copies: Vec<usize> = l
                .variables()
                .iter()
                .filter_map(|t| match t {
                    Term::Var(v) => Some(id(*v, i)),
                    Term::Prev(v) if i > 0 => Some(id(*v, i - 1)),
                    _ => None,
                })
                .collect();
            if let Atom::Eq(a, b) = &l.atom {
                if a.is_variable() && b.is_variable() && copies.len() == 2 {
                    let (ra, rb) = (find(&mut parent, copies[0]), find(&mut parent, copies[1]));
                    parent[ra] = rb;
                    continue;
                }
            }
            for (k, &u) in copies.iter().enumerate() {
                for &v in &copies[k + 1..] {
                    if u != v {
                        edges.push((u.min(v), u.max(v)));
                    }
                }
            }
        }
    }
    edges.sort();
    edges.dedup();
    let class = (0..nodes.len()).map(|x| find(&mut parent, x)).collect();
    ComputationGraph { nodes, edges, class }
}

impl ComputationGraph {
    /// Edges between merged classes with their weight: 1 if some
    /// underlying edge joins different positions, else 0.
    pub fn collapsed(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &(u, v) in &self.edges {
            let (cu, cv) = (self.class[u], self.class[v]);
            if cu == cv {
                continue;
            }
            let w = usize::from(self.nodes[u].1 != self.nodes[v].1);
            let e = out.entry((cu.min(cv), cu.max(cv))).or_insert(0);
            *e = (*e).max(w);
        }
        out
    }

    pub fn num_classes(&self) -> usize {
        let mut cs = self.class.clone();
        cs.sort();
        cs.dedup();
        cs.len()
    }

    /// Largest weight of a simple path in the collapsed graph.
    pub fn longest_path(&self) -> usize {
        let collapsed = self.collapsed();
        let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (&(a, b), &w) in &collapsed {
            adj.entry(a).or_default().push((b, w));
            adj.entry(b).or_default().push((a, w));
        }
        fn dfs(u: usize, adj: &BTreeMap<usize, Vec<(usize, usize)>>, seen: &mut Vec<usize>) -> usize {
            let mut best = 0;
            for &(v, w) in adj.get(&u).map(|v| v.as_slice()).unwrap_or(&[]) {
                if !seen.contains(&v) {
                    seen.push(v);
                    best = best.max(w + dfs(v, adj, seen));
                    seen.pop();
                }
            }
            best
        }
        adj.keys().map(|&u| dfs(u, &adj, &mut vec![u])).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LookbackResult {
    /// No word of at most this many labels exceeds the bound.
    HoldsUpTo(usize),
    /// A path through the automaton whose computation graph exceeds the bound.
    Violated { start: usize, transitions: Vec<usize>, length: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("lookback search explored more than {0} words")]
pub struct LookbackBudget(pub usize);

/// Search all automaton paths of at most `max_len` labels for one whose
/// computation graph has a path longer than `k`. Only a heuristic: a clean
/// result says nothing about longer words.
pub fn bounded_lookback_check(
    nfa: &Nfa,
    num_vars: usize,
    k: usize,
    max_len: usize,
    budget: usize,
) -> Result<LookbackResult, LookbackBudget> {
    let mut explored = 0;
    for start in nfa.property_states() {
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(start, Vec::new())];
        while let Some((q, word)) = stack.pop() {
            if !word.is_empty() {
                explored += 1;
                if explored > budget {
                    return Err(LookbackBudget(budget));
                }
                let symbols: Vec<Symbol> = word.iter().map(|&t| nfa.transitions[t].symbol.clone()).collect();
                let length = computation_graph(&symbols, num_vars).longest_path();
                if length > k {
                    return Ok(LookbackResult::Violated { start, transitions: word, length });
                }
            }
            if word.len() < max_len {
                for &t in nfa.outgoing(q) {
                    let mut w = word.clone();
                    w.push(t);
                    stack.push((nfa.transitions[t].to, w));
                }
            }
        }
    }
    Ok(LookbackResult::HoldsUpTo(max_len))
}
