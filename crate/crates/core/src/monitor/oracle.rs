//! Brute-force verdicts by enumerating bounded trace extensions.
//!
//! An extension adds up to `ext_size` fresh elements, completes every
//! function and predicate table not fixed by the facts, and appends between
//! 1 and `ext_len` assignments. Arithmetic sorts range over the numerals of
//! the problem, two points inside every gap between them and two points
//! beyond either end.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::One;

use crate::logic::property::Property;
use crate::logic::semantics::{eval_semantics, EvalError};
use crate::logic::signature::{FunId, PredId, Signature, SortId, SortKind};
use crate::logic::term::Term;

use super::facts::{Assignment, FactBase, Trace, Value};
use super::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBounds {
    /// Longest continuation appended to the trace.
    pub ext_len: usize,
    /// Most fresh elements added to the model.
    pub ext_size: usize,
    /// Most extended traces evaluated.
    pub budget: usize,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds { ext_len: 3, ext_size: 1, budget: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleVerdict {
    pub verdict: Verdict,
    /// For cs and cv, an extension with the opposite outcome.
    pub witness: Option<Trace>,
    /// Number of extended traces evaluated.
    pub explored: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("unsupported by the oracle: {0}")]
    Unsupported(String),
    #[error("more than {0} extensions to explore")]
    Budget(usize),
}

enum Slot {
    Fun(FunId, Vec<Value>),
    Pred(PredId, Vec<Value>),
}

/// Candidate values for arithmetic sorts.
fn arithmetic_candidates(sig: &Signature, p: &Property, tr: &Trace) -> BTreeMap<SortId, Vec<Value>> {
    let mut nums: BTreeSet<BigRational> = BTreeSet::new();
    let mut add = |v: &Value| {
        if let Value::Num(r) = v {
            nums.insert(r.clone());
        }
    };
    for ((_, args), v) in tr.facts.function_facts() {
        args.iter().for_each(&mut add);
        add(v);
    }
    for a in &tr.assignments {
        a.0.iter().for_each(&mut add);
    }
    p.visit_literals(&mut |l| {
        for t in l.atom.terms() {
            t.any(&mut |s| {
                if let Term::Num(r, _) = s {
                    nums.insert(r.clone());
                }
                false
            });
        }
    });
    if nums.is_empty() {
        nums.insert(BigRational::from_integer(0.into()));
    }
    let sorted: Vec<BigRational> = nums.into_iter().collect();
    let one = BigRational::one();
    let two = &one + &one;
    let three = &two + &one;
    let mut out = BTreeMap::new();
    for s in sig.sort_ids() {
        let kind = sig.sort_kind(s);
        if kind == SortKind::Uninterpreted {
            continue;
        }
        let (lo, hi) = (sorted[0].clone(), sorted[sorted.len() - 1].clone());
        let mut c: BTreeSet<BigRational> = sorted.iter().cloned().collect();
        for r in [&lo - &two, &lo - &one, &hi + &one, &hi + &two] {
            c.insert(r);
        }
        for w in sorted.windows(2) {
            let gap = &w[1] - &w[0];
            if kind == SortKind::Integer {
                let mid = (&w[0] + &w[1]) / &two;
                for r in [mid.floor(), mid.ceil()] {
                    if r > w[0] && r < w[1] {
                        c.insert(r);
                    }
                }
            } else {
                c.insert(&w[0] + &gap / &three);
                c.insert(&w[0] + &gap * &two / &three);
            }
        }
        let vals = c.into_iter().filter(|r| kind != SortKind::Integer || r.is_integer()).map(Value::Num).collect();
        out.insert(s, vals);
    }
    out
}

/// Every vector of fresh-element counts per uninterpreted sort with total at
/// most `n`, smallest totals first.
fn fresh_configs(sorts: &[SortId], n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in sorts {
        out = out.into_iter().flat_map(|v: Vec<usize>| (0..=n).map(move |k| [v.clone(), vec![k]].concat())).collect();
    }
    out.retain(|v| v.iter().sum::<usize>() <= n);
    out.sort_by_key(|v| v.iter().sum::<usize>());
    out
}

fn tuples(carriers: &[&[Value]]) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::new()];
    for c in carriers {
        out = out.into_iter().flat_map(|t: Vec<Value>| c.iter().map(move |v| [t.clone(), vec![v.clone()]].concat())).collect();
    }
    out
}

/// Advance a mixed-radix counter; false once it wraps around.
fn next_index(idx: &mut [usize], radix: &[usize]) -> bool {
    for (i, r) in idx.iter_mut().zip(radix) {
        *i += 1;
        if *i < *r {
            return true;
        }
        *i = 0;
    }
    false
}

/// The verdict of `p` on `tr` over the bounded universe of extensions.
/// cs and cv come with a witness; ps and pv mean no extension within the
/// bounds changes the outcome.
pub fn brute_force_verdict(
    sig: &Signature,
    p: &Property,
    tr: &Trace,
    bounds: OracleBounds,
) -> Result<OracleVerdict, OracleError> {
    for f in sig.fun_ids() {
        if sig.function(f).args.iter().any(|&s| sig.sort_kind(s) != SortKind::Uninterpreted) {
            return Err(OracleError::Unsupported(format!("function `{}` has an arithmetic argument", sig.function(f).name)));
        }
    }
    for q in sig.pred_ids() {
        if sig.predicate(q).args.iter().any(|&s| sig.sort_kind(s) != SortKind::Uninterpreted) {
            return Err(OracleError::Unsupported(format!("predicate `{}` has an arithmetic argument", sig.predicate(q).name)));
        }
    }
    let satisfied = eval_semantics(tr, p)?;
    let numerals = arithmetic_candidates(sig, p, tr);
    let unint: Vec<SortId> = sig.sort_ids().filter(|&s| sig.sort_kind(s) == SortKind::Uninterpreted).collect();
    let explicit_preds: BTreeSet<(PredId, Vec<Value>)> = tr.facts.predicate_facts().map(|(k, _)| k.clone()).collect();
    let mut explored = 0usize;

    for config in fresh_configs(&unint, bounds.ext_size) {
        let mut base = tr.facts.clone();
        let mut fresh: BTreeSet<Value> = BTreeSet::new();
        let mut carriers: BTreeMap<SortId, Vec<Value>> = numerals.clone();
        for (&s, &k) in unint.iter().zip(&config) {
            let mut i = 0;
            for _ in 0..k {
                let name = loop {
                    let n = format!("{}_new{i}", sig.sort(s).name.to_lowercase());
                    i += 1;
                    if !base.has_element(s, &n) {
                        break n;
                    }
                };
                base.add_element(s, &name);
                fresh.insert(Value::Elem(name));
            }
            carriers.insert(s, base.elements(s).map(|e| Value::Elem(e.clone())).collect());
        }

        let mut slots = Vec::new();
        let mut domains: Vec<&[Value]> = Vec::new();
        for f in sig.fun_ids() {
            let decl = sig.function(f);
            let cs: Vec<&[Value]> = decl.args.iter().map(|s| carriers[s].as_slice()).collect();
            for args in tuples(&cs) {
                if base.function_value(f, &args).is_none() {
                    domains.push(&carriers[&decl.result]);
                    slots.push(Slot::Fun(f, args));
                }
            }
        }
        let mut pred_slots = 0;
        for q in sig.pred_ids() {
            let decl = sig.predicate(q);
            let cs: Vec<&[Value]> = decl.args.iter().map(|s| carriers[s].as_slice()).collect();
            for args in tuples(&cs) {
                let touches_fresh = args.iter().any(|a| fresh.contains(a));
                let fixed = explicit_preds.contains(&(q, args.clone())) || (tr.facts.closed_world && !touches_fresh);
                if !fixed {
                    slots.push(Slot::Pred(q, args));
                    pred_slots += 1;
                }
            }
        }
        if domains.iter().any(|d| d.is_empty()) {
            // Some function has no possible value in this configuration.
            continue;
        }
        let radix: Vec<usize> = domains.iter().map(|d| d.len()).chain(std::iter::repeat(2).take(pred_slots)).collect();
        let completions = radix.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r)).filter(|&n| n <= bounds.budget);
        if completions.is_none() {
            return Err(OracleError::Budget(bounds.budget));
        }

        let var_domains: Vec<&[Value]> = sig.var_ids().map(|v| carriers[&sig.var_sort(v)].as_slice()).collect();
        if var_domains.iter().any(|d| d.is_empty()) {
            continue;
        }
        let steps: Vec<Assignment> = tuples(&var_domains).into_iter().map(Assignment).collect();

        let mut idx = vec![0usize; radix.len()];
        loop {
            let mut fb: FactBase = base.clone();
            for (k, slot) in slots.iter().enumerate() {
                match slot {
                    Slot::Fun(f, args) => {
                        let v = domains[k][idx[k]].clone();
                        fb.set_function(sig, *f, args.clone(), v).expect("slot values are well sorted");
                    }
                    Slot::Pred(q, args) => {
                        fb.set_predicate(sig, *q, args.clone(), idx[k] == 1).expect("slot values are well sorted");
                    }
                }
            }
            fb.closed_world = true;
            let mut ext = Trace { facts: fb, assignments: tr.assignments.clone() };
            let base_len = ext.assignments.len();
            for len in 1..=bounds.ext_len {
                let mut seq = vec![0usize; len];
                loop {
                    explored += 1;
                    if explored > bounds.budget {
                        return Err(OracleError::Budget(bounds.budget));
                    }
                    ext.assignments.truncate(base_len);
                    ext.assignments.extend(seq.iter().map(|&i| steps[i].clone()));
                    if eval_semantics(&ext, p)? != satisfied {
                        let verdict = if satisfied { Verdict::Cs } else { Verdict::Cv };
                        return Ok(OracleVerdict { verdict, witness: Some(ext), explored });
                    }
                    if !next_index(&mut seq, &vec![steps.len(); len]) {
                        break;
                    }
                }
            }
            if !next_index(&mut idx, &radix) {
                break;
            }
        }
    }
    let verdict = if satisfied { Verdict::Ps } else { Verdict::Pv };
    Ok(OracleVerdict { verdict, witness: None, explored })
}
