//! DOT rendering of coreachability graphs.

use crate::automaton::export::dot_escape;
use crate::automaton::Nfa;
use crate::logic::signature::Signature;

use super::graph::{CoreachGraph, Polarity};

pub fn cg_to_dot(g: &CoreachGraph, nfa: &Nfa, sig: &Signature) -> String {
    let name = match g.polarity {
        Polarity::Positive => "cg_pos",
        Polarity::Negative => "cg_neg",
    };
    let mut out = format!("digraph {name} {{\n  rankdir=RL;\n");
    for (i, n) in g.nodes.iter().enumerate() {
        let shape = if g.roots.contains(&i) { "doubleoctagon" } else { "box" };
        let label = format!("{} | {}", nfa.state_label(sig, n.state), n.formula.display(sig));
        out += &format!("  n{i} [shape={shape}, label=\"{}\"];\n", dot_escape(&label));
    }
    for e in &g.edges {
        let label = nfa.transitions[e.transition].symbol.display(sig).to_string();
        out += &format!("  n{} -> n{} [label=\"{}\"];\n", e.from, e.to, dot_escape(&label));
    }
    out + "}\n"
}
