//! Exhaustive enumeration of small finite structures, used by test oracles
//! and by the brute-force verdict check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::logic::signature::{FunId, PredId, Signature, SortId, SortKind};
use crate::monitor::facts::{Assignment, FactBase, Value};

/// A structure with finite carriers and total function and predicate tables
/// over them. Arithmetic sorts are represented by the numerals `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteModel {
    pub carriers: BTreeMap<SortId, Vec<Value>>,
    pub functions: BTreeMap<(FunId, Vec<Value>), Value>,
    pub predicates: BTreeMap<(PredId, Vec<Value>), bool>,
}

/// Name of the `i`-th element of an uninterpreted sort in enumerated models.
pub fn element_name(sig: &Signature, sort: SortId, i: usize) -> String {
    format!("{}{i}", sig.sort(sort).name.to_lowercase())
}

fn carrier(sig: &Signature, sort: SortId, n: usize) -> Vec<Value> {
    match sig.sort_kind(sort) {
        SortKind::Uninterpreted => (0..n).map(|i| Value::Elem(element_name(sig, sort, i))).collect(),
        _ => (0..n as i64).map(Value::num).collect(),
    }
}

fn tuples(carriers: &BTreeMap<SortId, Vec<Value>>, sorts: &[SortId]) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::new()];
    for s in sorts {
        let mut next = Vec::new();
        for prefix in &out {
            for v in &carriers[s] {
                let mut t = prefix.clone();
                t.push(v.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

impl FiniteModel {
    /// All variable assignments over the carriers.
    pub fn assignments(&self, sig: &Signature) -> Vec<Assignment> {
        let sorts: Vec<SortId> = sig.var_ids().map(|v| sig.var_sort(v)).collect();
        tuples(&self.carriers, &sorts).into_iter().map(Assignment).collect()
    }

    /// The model as a closed-world fact base.
    pub fn to_factbase(&self, sig: &Signature) -> FactBase {
        let mut fb = FactBase::new();
        fb.closed_world = true;
        for (&s, vals) in &self.carriers {
            if sig.sort_kind(s) == SortKind::Uninterpreted {
                for v in vals {
                    if let Value::Elem(n) = v {
                        fb.add_element(s, n);
                    }
                }
            }
        }
        for ((f, args), v) in &self.functions {
            fb.set_function(sig, *f, args.clone(), v.clone()).expect("enumerated tables are well sorted");
        }
        for ((p, args), b) in &self.predicates {
            fb.set_predicate(sig, *p, args.clone(), *b).expect("enumerated tables are well sorted");
        }
        fb
    }
}

enum Slot {
    Fun(FunId, Vec<Value>, SortId),
    Pred(PredId, Vec<Value>),
}

/// Every model whose carrier for sort `s` has exactly `sizes[s]` elements.
/// Returns `None` when there would be more than `cap` models.
pub fn enumerate_models_exact(sig: &Signature, sizes: &BTreeMap<SortId, usize>, cap: usize) -> Option<Vec<FiniteModel>> {
    let carriers: BTreeMap<SortId, Vec<Value>> =
        sig.sort_ids().map(|s| (s, carrier(sig, s, sizes.get(&s).copied().unwrap_or(1)))).collect();
    let mut slots = Vec::new();
    for f in sig.fun_ids() {
        let decl = sig.function(f);
        for args in tuples(&carriers, &decl.args) {
            slots.push(Slot::Fun(f, args, decl.result));
        }
    }
    for p in sig.pred_ids() {
        for args in tuples(&carriers, &sig.predicate(p).args) {
            slots.push(Slot::Pred(p, args));
        }
    }
    let radix: Vec<usize> = slots
        .iter()
        .map(|s| match s {
            Slot::Fun(_, _, r) => carriers[r].len(),
            Slot::Pred(..) => 2,
        })
        .collect();
    let mut total: usize = 1;
    for &r in &radix {
        if r == 0 {
            return Some(Vec::new());
        }
        total = total.checked_mul(r).filter(|&t| t <= cap)?;
    }
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; slots.len()];
    loop {
        let mut m = FiniteModel { carriers: carriers.clone(), functions: BTreeMap::new(), predicates: BTreeMap::new() };
        for (slot, &d) in slots.iter().zip(&digits) {
            match slot {
                Slot::Fun(f, args, r) => {
                    m.functions.insert((*f, args.clone()), carriers[r][d].clone());
                }
                Slot::Pred(p, args) => {
                    m.predicates.insert((*p, args.clone()), d == 1);
                }
            }
        }
        out.push(m);
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Some(out);
            }
            digits[i] += 1;
            if digits[i] < radix[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Models with every uninterpreted carrier of size `1..=bound` and arithmetic
/// carriers of size `bound`. Size vectors whose model count exceeds `cap`
/// are skipped; the second component counts them.
pub fn enumerate_small_models(sig: &Signature, bound: usize, cap: usize) -> (Vec<FiniteModel>, usize) {
    let sorts: Vec<SortId> = sig.sort_ids().collect();
    let mut size_vectors = vec![BTreeMap::new()];
    for &s in &sorts {
        let range: Vec<usize> =
            if sig.sort_kind(s) == SortKind::Uninterpreted { (1..=bound).collect() } else { vec![bound] };
        let mut next = Vec::new();
        for sv in &size_vectors {
            for &n in &range {
                let mut sv: BTreeMap<SortId, usize> = sv.clone();
                sv.insert(s, n);
                next.push(sv);
            }
        }
        size_vectors = next;
    }
    let mut out = Vec::new();
    let mut skipped = 0;
    for sv in size_vectors {
        match enumerate_models_exact(sig, &sv, cap.saturating_sub(out.len())) {
            Some(ms) => out.extend(ms),
            None => skipped += 1,
        }
    }
    (out, skipped)
}
