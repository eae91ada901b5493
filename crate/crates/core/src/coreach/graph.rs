//! Coreachability graphs: backward fixpoints of regression from the final
//! (positive polarity) or non-final (negative polarity) automaton states.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automaton::{Nfa, NfaState};
use crate::logic::formula::Formula;
use crate::logic::property::Property;
use crate::logic::signature::Signature;
use crate::theory::{Theory, TheoryError};

use super::regress::regress;

pub const DEFAULT_MAX_NODES: usize = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CgNode {
    pub state: usize,
    pub formula: Formula,
}

/// An edge from `from` to `to` via the automaton transition `transition`,
/// which goes from `from`'s state to `to`'s state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CgEdge {
    pub from: usize,
    pub transition: usize,
    pub to: usize,
}

/// Why construction stopped before the fixpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    pub reason: String,
    /// The state with the most nodes when construction stopped.
    pub state: Option<usize>,
    /// The node formulas at that state, oldest first.
    pub chain: Vec<Formula>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreachGraph {
    pub polarity: Polarity,
    pub nodes: Vec<CgNode>,
    pub edges: Vec<CgEdge>,
    /// Root node indices.
    pub roots: Vec<usize>,
    /// Set when the fixpoint was not reached; the graph is then partial.
    pub divergence: Option<Divergence>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreachError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// Whether `q` is a root state for the polarity.
pub fn is_root_state(nfa: &Nfa, q: usize, polarity: Polarity) -> bool {
    nfa.is_final(q) == (polarity == Polarity::Positive)
}

/// Root states from which every path of the automaton witnesses a finished
/// run of that polarity: `q+` and `<⊤>`, or `q−` and `<⊥>`.
pub fn is_terminal_state(nfa: &Nfa, q: usize, polarity: Polarity) -> bool {
    match (&nfa.states[q], polarity) {
        (NfaState::Accept, Polarity::Positive) | (NfaState::Reject, Polarity::Negative) => true,
        (NfaState::Formula(Property::True), Polarity::Positive) => true,
        (NfaState::Formula(Property::False), Polarity::Negative) => true,
        _ => false,
    }
}

/// Options for graph construction.
#[derive(Debug, Clone, Copy)]
pub struct CgOptions {
    pub max_nodes: usize,
    /// Process the worklist last-in first-out instead of first-in first-out.
    pub lifo: bool,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions { max_nodes: DEFAULT_MAX_NODES, lifo: false }
    }
}

pub fn build_cg(
    sig: &Signature,
    nfa: &Nfa,
    th: &mut dyn Theory,
    polarity: Polarity,
    opts: CgOptions,
) -> Result<CoreachGraph, CoreachError> {
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); nfa.num_states()];
    for (i, t) in nfa.transitions.iter().enumerate() {
        incoming[t.to].push(i);
    }
    let mut g = CoreachGraph { polarity, nodes: Vec::new(), edges: Vec::new(), roots: Vec::new(), divergence: None };
    let mut by_key: HashMap<(usize, Formula), usize> = HashMap::new();
    let mut by_state: Vec<Vec<usize>> = vec![Vec::new(); nfa.num_states()];
    let mut edges: BTreeSet<CgEdge> = BTreeSet::new();
    let mut work: VecDeque<usize> = VecDeque::new();
    for q in 0..nfa.num_states() {
        if is_root_state(nfa, q, polarity) {
            let n = g.nodes.len();
            g.nodes.push(CgNode { state: q, formula: Formula::True });
            by_key.insert((q, Formula::True), n);
            by_state[q].push(n);
            g.roots.push(n);
            work.push_back(n);
        }
    }
    let diverged = |g: &CoreachGraph, by_state: &[Vec<usize>], reason: String| {
        let state = (0..by_state.len()).max_by_key(|&q| by_state[q].len());
        let chain = state.map(|q| by_state[q].iter().map(|&n| g.nodes[n].formula.clone()).collect()).unwrap_or_default();
        Divergence { reason, state, chain }
    };
    while let Some(n) = if opts.lifo { work.pop_back() } else { work.pop_front() } {
        let (q, phi) = (g.nodes[n].state, g.nodes[n].formula.clone());
        for &t in &incoming[q] {
            let tr = &nfa.transitions[t];
            let r = match regress(sig, th, &phi, &tr.symbol).and_then(|r| th.is_satisfiable(&r).map(|s| (r, s))) {
                Ok((r, true)) => r,
                Ok((_, false)) => continue,
                Err(TheoryError::Resource(msg)) => {
                    g.divergence = Some(diverged(&g, &by_state, format!("resource limit: {msg}")));
                    g.edges = edges.into_iter().collect();
                    return Ok(g);
                }
                Err(e) => return Err(e.into()),
            };
            let src = tr.from;
            let mut found = by_key.get(&(src, r.clone())).copied();
            if found.is_none() {
                for &m in &by_state[src] {
                    match th.are_equivalent(&g.nodes[m].formula, &r) {
                        Ok(true) => {
                            found = Some(m);
                            break;
                        }
                        Ok(false) => {}
                        Err(TheoryError::Resource(msg)) => {
                            g.divergence = Some(diverged(&g, &by_state, format!("resource limit: {msg}")));
                            g.edges = edges.into_iter().collect();
                            return Ok(g);
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            let m = match found {
                Some(m) => m,
                None => {
                    if g.nodes.len() >= opts.max_nodes {
                        g.divergence = Some(diverged(&g, &by_state, format!("more than {} nodes", opts.max_nodes)));
                        g.edges = edges.into_iter().collect();
                        return Ok(g);
                    }
                    let m = g.nodes.len();
                    g.nodes.push(CgNode { state: src, formula: r.clone() });
                    by_state[src].push(m);
                    work.push_back(m);
                    m
                }
            };
            by_key.insert((src, r), m);
            edges.insert(CgEdge { from: m, transition: t, to: n });
        }
    }
    g.edges = edges.into_iter().collect();
    Ok(g)
}

impl CoreachGraph {
    pub fn is_complete(&self) -> bool {
        self.divergence.is_none()
    }

    pub fn nodes_at(&self, q: usize) -> impl Iterator<Item = &CgNode> + '_ {
        self.nodes.iter().filter(move |n| n.state == q)
    }

    /// Disjunction of all node formulas at `q`; false if there are none.
    pub fn ext_formula(&self, q: usize) -> Formula {
        Formula::or(self.nodes_at(q).map(|n| n.formula.clone()))
    }

    /// Nodes that reach a terminal root (see [`is_terminal_state`]) along
    /// at least one edge.
    pub fn continuing_nodes(&self, nfa: &Nfa) -> Vec<bool> {
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            preds[e.to].push(e.from);
        }
        let mut mark = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = Vec::new();
        for &r in &self.roots {
            if is_terminal_state(nfa, self.nodes[r].state, self.polarity) {
                stack.extend(&preds[r]);
            }
        }
        while let Some(n) = stack.pop() {
            if !mark[n] {
                mark[n] = true;
                stack.extend(&preds[n]);
            }
        }
        mark
    }

    /// Disjunction of the formulas of continuing nodes at `q`: the condition
    /// on the current values under which some non-empty continuation ends a
    /// run of this graph's polarity.
    pub fn continuation_formula(&self, nfa: &Nfa, q: usize) -> Formula {
        let mark = self.continuing_nodes(nfa);
        Formula::or((0..self.nodes.len()).filter(|&n| mark[n] && self.nodes[n].state == q).map(|n| self.nodes[n].formula.clone()))
    }

    /// Every edge follows an automaton transition between the nodes' states,
    /// and every node reaches a root.
    pub fn check_structure(&self, nfa: &Nfa) -> Result<(), String> {
        for e in &self.edges {
            let t = &nfa.transitions[e.transition];
            if t.from != self.nodes[e.from].state || t.to != self.nodes[e.to].state {
                return Err(format!("edge {e:?} does not follow its transition"));
            }
        }
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            succ[e.from].push(e.to);
            preds[e.to].push(e.from);
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = self.roots.clone();
        while let Some(n) = stack.pop() {
            if !seen[n] {
                seen[n] = true;
                stack.extend(&preds[n]);
            }
        }
        if let Some(n) = seen.iter().position(|s| !s) {
            return Err(format!("node {n} reaches no root"));
        }
        for &r in &self.roots {
            if !is_root_state(nfa, self.nodes[r].state, self.polarity) {
                return Err(format!("root {r} is at a state of the wrong polarity"));
            }
        }
        for n in &self.nodes {
            if n.formula.has_prev() {
                return Err("a node formula mentions a previous value".into());
            }
        }
        Ok(())
    }

    /// Every path of at most `max_len` edges starting at a node, as
    /// (node sequence, transition sequence).
    pub fn paths_from(&self, start: usize, max_len: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out_edges: Vec<Vec<&CgEdge>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            out_edges[e.from].push(e);
        }
        let mut out = Vec::new();
        let mut stack = vec![(vec![start], Vec::new())];
        while let Some((nodes, trans)) = stack.pop() {
            if trans.len() < max_len {
                for e in &out_edges[*nodes.last().unwrap()] {
                    let mut n2 = nodes.clone();
                    n2.push(e.to);
                    let mut t2: Vec<usize> = trans.clone();
                    t2.push(e.transition);
                    stack.push((n2, t2));
                }
            }
            out.push((nodes, trans));
        }
        out
    }
}
