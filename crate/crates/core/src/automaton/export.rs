//! Graph exports of automata: DOT for rendering, JSON for tools.

use serde_json::{json, Value as Json};

use crate::logic::signature::Signature;

use super::nfa::Nfa;
use super::symbol::LastMarker;

pub(crate) fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn nfa_to_dot(nfa: &Nfa, sig: &Signature) -> String {
    let mut out = String::from("digraph nfa {\n  rankdir=LR;\n  start [shape=point];\n");
    for q in 0..nfa.num_states() {
        let shape = if nfa.is_final(q) { "doublecircle" } else { "circle" };
        out += &format!("  s{q} [shape={shape}, label=\"{}\"];\n", dot_escape(&nfa.state_label(sig, q)));
    }
    out += &format!("  start -> s{};\n", Nfa::INITIAL);
    for t in &nfa.transitions {
        out += &format!("  s{} -> s{} [label=\"{}\"];\n", t.from, t.to, dot_escape(&t.symbol.display(sig).to_string()));
    }
    out + "}\n"
}

pub fn nfa_to_json(nfa: &Nfa, sig: &Signature) -> Json {
    let states: Vec<Json> = (0..nfa.num_states())
        .map(|q| json!({ "id": q, "label": nfa.state_label(sig, q), "final": nfa.is_final(q) }))
        .collect();
    let transitions: Vec<Json> = nfa
        .transitions
        .iter()
        .map(|t| {
            let marker = match t.symbol.marker {
                LastMarker::Absent => Json::Null,
                LastMarker::Last => json!("last"),
                LastMarker::NotLast => json!("not-last"),
            };
            let lits: Vec<String> = t.symbol.lits.iter().map(|l| l.display(sig).to_string()).collect();
            json!({ "from": t.from, "to": t.to, "constraints": lits, "marker": marker })
        })
        .collect();
    json!({ "initial": Nfa::INITIAL, "states": states, "transitions": transitions })
}
