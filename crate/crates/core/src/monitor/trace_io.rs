//! JSON trace documents.
//!
//! ```json
//! {"elements": {"Ticket": ["t1", "t2"]},
//!  "facts": [["myc", "c1"], ["price", "t2", 100], ["not", "P", "t1"]],
//!  "closed_world": false,
//!  "trace": [{"t": "t2", "b": "t2"}]}
//! ```
//!
//! A fact `[f, a1, .., an, v]` fixes a function value, `[P, a1, .., an]`
//! asserts a predicate and `["not", P, ..]` denies it. Numbers are JSON
//! numbers or strings such as `"-3/4"`. The optional `sorts` list names
//! sorts that must exist in the signature.

use serde_json::{json, Map, Value as Json};

use crate::logic::parse::parse_numeral;
use crate::logic::signature::{Signature, SortId, SortKind, Symbol as SigSymbol};

use super::facts::{Assignment, FactBase, Trace, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Format(String),
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
}

fn fmt_err(msg: impl Into<String>) -> TraceError {
    TraceError::Format(msg.into())
}

/// Read a JSON value as a value of `sort`.
pub fn parse_value(sig: &Signature, sort: SortId, j: &Json) -> Result<Value, TraceError> {
    let sort_name = &sig.sort(sort).name;
    match (sig.sort_kind(sort), j) {
        (SortKind::Uninterpreted, Json::String(s)) => Ok(Value::Elem(s.clone())),
        (SortKind::Uninterpreted, _) => Err(fmt_err(format!("expected an element of `{sort_name}`, got {j}"))),
        (_, Json::Number(n)) => {
            parse_numeral(&n.to_string()).map(Value::Num).ok_or_else(|| fmt_err(format!("bad number {n}")))
        }
        (_, Json::String(s)) => {
            parse_numeral(s).map(Value::Num).ok_or_else(|| fmt_err(format!("bad number `{s}` for sort `{sort_name}`")))
        }
        _ => Err(fmt_err(format!("expected a number of sort `{sort_name}`, got {j}"))),
    }
}

fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Elem(n) => Json::String(n.clone()),
        Value::Num(r) if r.is_integer() => match i64::try_from(r.to_integer()) {
            Ok(i) => json!(i),
            Err(_) => Json::String(v.to_string()),
        },
        Value::Num(_) => Json::String(v.to_string()),
    }
}

/// Parse the fact part of a trace document (everything except `trace`).
pub fn parse_facts(sig: &Signature, doc: &Json) -> Result<FactBase, TraceError> {
    let obj = doc.as_object().ok_or_else(|| fmt_err("a trace document must be an object"))?;
    let mut fb = FactBase::new();
    if let Some(sorts) = obj.get("sorts") {
        let sorts = sorts.as_array().ok_or_else(|| fmt_err("`sorts` must be a list"))?;
        for s in sorts {
            let name = s.as_str().ok_or_else(|| fmt_err("`sorts` entries must be strings"))?;
            sig.sort_by_name(name).ok_or_else(|| fmt_err(format!("unknown sort `{name}`")))?;
        }
    }
    if let Some(els) = obj.get("elements") {
        let els = els.as_object().ok_or_else(|| fmt_err("`elements` must map sort names to lists"))?;
        for (sort, names) in els {
            let s = sig.sort_by_name(sort).ok_or_else(|| fmt_err(format!("unknown sort `{sort}`")))?;
            if sig.sort_kind(s) != SortKind::Uninterpreted {
                return Err(fmt_err(format!("sort `{sort}` is arithmetic and has no declared elements")));
            }
            for n in names.as_array().ok_or_else(|| fmt_err(format!("elements of `{sort}` must be a list")))? {
                let n = n.as_str().ok_or_else(|| fmt_err("element names must be strings"))?;
                fb.add_element(s, n);
            }
        }
    }
    fb.closed_world = match obj.get("closed_world") {
        None => false,
        Some(b) => b.as_bool().ok_or_else(|| fmt_err("`closed_world` must be a boolean"))?,
    };
    if let Some(facts) = obj.get("facts") {
        let facts = facts.as_array().ok_or_else(|| fmt_err("`facts` must be a list"))?;
        for (i, f) in facts.iter().enumerate() {
            add_fact(sig, &mut fb, f).map_err(|e| fmt_err(format!("fact {i}: {e}")))?;
        }
    }
    Ok(fb)
}

fn add_fact(sig: &Signature, fb: &mut FactBase, f: &Json) -> Result<(), TraceError> {
    let items = f.as_array().ok_or_else(|| fmt_err("a fact must be a list"))?;
    let head = items.first().and_then(|h| h.as_str()).ok_or_else(|| fmt_err("a fact starts with a symbol name"))?;
    let (holds, items) = if head == "not" { (false, &items[1..]) } else { (true, &items[..]) };
    let name = items.first().and_then(|h| h.as_str()).ok_or_else(|| fmt_err("missing symbol after `not`"))?;
    let args = &items[1..];
    let fact = |e: super::facts::FactError| fmt_err(e.to_string());
    match sig.lookup(name) {
        Some(SigSymbol::Fun(fid)) if holds => {
            let decl = sig.function(fid);
            if args.len() != decl.args.len() + 1 {
                return Err(fmt_err(format!("`{name}` takes {} argument(s) and a value", decl.args.len())));
            }
            let vals = args[..decl.args.len()]
                .iter()
                .zip(&decl.args)
                .map(|(a, &s)| parse_value(sig, s, a))
                .collect::<Result<Vec<_>, _>>()?;
            let v = parse_value(sig, decl.result, &args[decl.args.len()])?;
            fb.set_function(sig, fid, vals, v).map_err(fact)
        }
        Some(SigSymbol::Pred(pid)) => {
            let decl = sig.predicate(pid);
            if args.len() != decl.args.len() {
                return Err(fmt_err(format!("`{name}` takes {} argument(s)", decl.args.len())));
            }
            let vals =
                args.iter().zip(&decl.args).map(|(a, &s)| parse_value(sig, s, a)).collect::<Result<Vec<_>, _>>()?;
            fb.set_predicate(sig, pid, vals, holds).map_err(fact)
        }
        Some(SigSymbol::Fun(_)) => Err(fmt_err(format!("`not` applies to predicates, not to `{name}`"))),
        _ => Err(fmt_err(format!("unknown function or predicate `{name}`"))),
    }
}

/// Parse one assignment object.
pub fn parse_assignment(sig: &Signature, j: &Json) -> Result<Assignment, TraceError> {
    let obj = j.as_object().ok_or_else(|| fmt_err("an assignment must be an object"))?;
    for k in obj.keys() {
        if sig.var_by_name(k).is_none() {
            return Err(fmt_err(format!("unknown variable `{k}`")));
        }
    }
    let vals = sig
        .var_ids()
        .map(|v| {
            let name = &sig.variable(v).name;
            let j = obj.get(name).ok_or_else(|| fmt_err(format!("variable `{name}` is unassigned")))?;
            parse_value(sig, sig.var_sort(v), j)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Assignment(vals))
}

/// Parse a whole trace document.
pub fn parse_trace(sig: &Signature, text: &str) -> Result<Trace, TraceError> {
    let doc: Json = serde_json::from_str(text).map_err(|e| TraceError::Json(e.to_string()))?;
    let facts = parse_facts(sig, &doc)?;
    let steps = match doc.get("trace") {
        None => Vec::new(),
        Some(t) => t.as_array().ok_or_else(|| fmt_err("`trace` must be a list"))?.clone(),
    };
    let assignments = steps
        .iter()
        .enumerate()
        .map(|(i, a)| parse_assignment(sig, a).map_err(|e| fmt_err(format!("trace[{i}]: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Trace { facts, assignments })
}

/// Parse one line of an assignment stream; `line` is 1-based.
pub fn parse_stream_line(sig: &Signature, line: usize, text: &str) -> Result<Assignment, TraceError> {
    let j: Json =
        serde_json::from_str(text).map_err(|e| TraceError::Line { line, msg: format!("invalid JSON: {e}") })?;
    parse_assignment(sig, &j).map_err(|e| TraceError::Line { line, msg: e.to_string() })
}

pub fn assignment_to_json(sig: &Signature, a: &Assignment) -> Json {
    let mut m = Map::new();
    for v in sig.var_ids() {
        m.insert(sig.variable(v).name.clone(), value_to_json(a.get(v)));
    }
    Json::Object(m)
}

/// The document form of a trace, readable by [`parse_trace`].
pub fn trace_to_json(sig: &Signature, tr: &Trace) -> Json {
    let mut elements = Map::new();
    for s in sig.sort_ids() {
        let els: Vec<Json> = tr.facts.elements(s).map(|e| Json::String(e.clone())).collect();
        if !els.is_empty() {
            elements.insert(sig.sort(s).name.clone(), Json::Array(els));
        }
    }
    let mut facts = Vec::new();
    for ((f, args), v) in tr.facts.function_facts() {
        let mut row = vec![Json::String(sig.function(*f).name.clone())];
        row.extend(args.iter().map(value_to_json));
        row.push(value_to_json(v));
        facts.push(Json::Array(row));
    }
    for ((p, args), holds) in tr.facts.predicate_facts() {
        let mut row = Vec::new();
        if !holds {
            row.push(json!("not"));
        }
        row.push(Json::String(sig.predicate(*p).name.clone()));
        row.extend(args.iter().map(value_to_json));
        facts.push(Json::Array(row));
    }
    json!({
        "elements": elements,
        "facts": facts,
        "closed_world": tr.facts.closed_world,
        "trace": tr.assignments.iter().map(|a| assignment_to_json(sig, a)).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::parse_signature;

    const SIG: &str = "(sort T) (sort Real :rational) (fun price (T) Real) (const c T) (pred P (T)) (var x T) (var r Real)";

    #[test]
    fn round_trip() {
        let sig = parse_signature(SIG).unwrap();
        let text = r#"{"sorts": ["T"], "elements": {"T": ["a", "b"]},
            "facts": [["c", "a"], ["price", "a", 100], ["price", "b", "1/2"], ["P", "a"], ["not", "P", "b"]],
            "trace": [{"x": "a", "r": 1.5}, {"x": "b", "r": -2}]}"#;
        let tr = parse_trace(&sig, text).unwrap();
        assert_eq!(tr.len(), 2);
        assert_eq!(tr.assignments[0].0[1], Value::Num(parse_numeral("3/2").unwrap()));
        let again = parse_trace(&sig, &trace_to_json(&sig, &tr).to_string()).unwrap();
        assert_eq!(again, tr);
    }

    #[test]
    fn rejects_bad_input() {
        let sig = parse_signature(SIG).unwrap();
        assert!(parse_trace(&sig, r#"{"facts": [["nope", "a"]]}"#).is_err());
        assert!(parse_trace(&sig, r#"{"elements": {"T": ["a"]}, "trace": [{"x": "a"}]}"#).is_err());
        assert!(parse_trace(&sig, r#"{"elements": {"T": ["a"]}, "trace": [{"x": "a", "r": 0, "z": 1}]}"#).is_err());
        let e = parse_stream_line(&sig, 7, "{oops").unwrap_err();
        assert!(matches!(e, TraceError::Line { line: 7, .. }));
    }
}
