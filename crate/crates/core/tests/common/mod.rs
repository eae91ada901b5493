//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use datamon::logic::formula::Formula;
use datamon::logic::parse::{parse_formula, parse_numeral};
use datamon::logic::property::Property;
use datamon::logic::signature::{Signature, SortId, SortKind, VarId};
use datamon::logic::term::Literal;
use datamon::monitor::facts::{eval_ground, Assignment, Env, FactBase, Trace, Tri, Value};
use datamon::theory::models::FiniteModel;

pub fn lits(sig: &Signature, texts: &[&str]) -> Vec<Literal> {
    texts.iter().map(|t| parse_formula(t, sig).unwrap().literals().remove(0)).collect()
}

/// A random property with at most `atoms` literal occurrences and temporal
/// depth at most `depth`.
pub fn random_property(rng: &mut impl Rng, pool: &[Literal], depth: usize, atoms: usize) -> Property {
    let leaf = |rng: &mut dyn rand::RngCore| {
        let l = pool.choose(rng).unwrap().clone();
        Property::lit(if rng.gen_bool(0.5) { l } else { l.negate() })
    };
    if atoms == 0 {
        return if rng.gen_bool(0.5) { Property::True } else { Property::False };
    }
    let choice = rng.gen_range(0..10);
    match choice {
        0 | 1 => leaf(rng),
        2 | 3 if atoms >= 2 => {
            let k = rng.gen_range(1..atoms);
            let a = random_property(rng, pool, depth, k);
            let b = random_property(rng, pool, depth, atoms - k);
            if choice == 2 {
                Property::and([a, b])
            } else {
                Property::or([a, b])
            }
        }
        4..=9 if depth > 0 => {
            let d = depth - 1;
            match choice {
                4 => Property::next(random_property(rng, pool, d, atoms)),
                5 => Property::weak_next(random_property(rng, pool, d, atoms)),
                6 => Property::eventually(random_property(rng, pool, d, atoms)),
                7 => Property::always(random_property(rng, pool, d, atoms)),
                _ if atoms >= 2 => {
                    let k = rng.gen_range(1..atoms);
                    let a = random_property(rng, pool, d, k);
                    let b = random_property(rng, pool, d, atoms - k);
                    if choice == 8 {
                        Property::until(a, b)
                    } else {
                        Property::release(a, b)
                    }
                }
                _ => Property::always(random_property(rng, pool, d, atoms)),
            }
        }
        _ => leaf(rng),
    }
}

/// Every sequence of `len` items drawn from `items`.
pub fn sequences<T: Clone>(items: &[T], len: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|s| {
                items.iter().map(move |x| {
                    let mut s = s.clone();
                    s.push(x.clone());
                    s
                })
            })
            .collect();
    }
    out
}

pub fn num(s: &str) -> Value {
    Value::Num(parse_numeral(s).unwrap())
}

/// `grid` refined with `k - 1` evenly spaced points inside every gap and
/// two points beyond either end.
pub fn refine(grid: &[Value], k: i64) -> Vec<Value> {
    let rs: Vec<BigRational> = grid
        .iter()
        .map(|v| match v {
            Value::Num(r) => r.clone(),
            Value::Elem(_) => panic!("numeric grid expected"),
        })
        .collect();
    let mut out: Vec<BigRational> = rs.clone();
    let one = BigRational::from_integer(1.into());
    out.push(&rs[0] - &one);
    out.push(&rs[0] - &one - &one);
    out.push(&rs[rs.len() - 1] + &one);
    out.push(&rs[rs.len() - 1] + &one + &one);
    for w in rs.windows(2) {
        for i in 1..k {
            out.push(&w[0] + (&w[1] - &w[0]) * BigRational::new(i.into(), k.into()));
        }
    }
    out.sort();
    out.dedup();
    out.into_iter().map(Value::Num).collect()
}

/// Values a variable of each sort ranges over: the model carrier for
/// uninterpreted sorts and `grid` for arithmetic ones.
pub fn var_domains(sig: &Signature, carriers: &BTreeMap<SortId, Vec<Value>>, grid: &[Value]) -> Vec<Vec<Value>> {
    sig.var_ids()
        .map(|v| {
            let s = sig.var_sort(v);
            if sig.sort_kind(s) == SortKind::Uninterpreted {
                carriers[&s].clone()
            } else {
                grid.to_vec()
            }
        })
        .collect()
}

pub fn product(domains: &[Vec<Value>]) -> Vec<Assignment> {
    let mut out = vec![Vec::new()];
    for d in domains {
        out = out
            .into_iter()
            .flat_map(|t: Vec<Value>| {
                d.iter().map(move |v| {
                    let mut t = t.clone();
                    t.push(v.clone());
                    t
                })
            })
            .collect();
    }
    out.into_iter().map(Assignment).collect()
}

pub fn holds(f: &Formula, facts: &FactBase, a: &Assignment) -> bool {
    match eval_ground(f, facts, Env { prev: None, curr: a }) {
        Tri::True => true,
        Tri::False => false,
        Tri::Unknown => panic!("formula undetermined over a total model"),
    }
}

/// Extensions of `m` by fresh elements: for every vector of fresh-element
/// counts (at most `max_new` per uninterpreted sort), every completion of
/// the tables on tuples involving fresh elements. Arithmetic function values
/// on fresh tuples range over `grid`. `visit` returning true stops the search.
pub fn for_each_extension(
    sig: &Signature,
    m: &FiniteModel,
    max_new: &BTreeMap<SortId, usize>,
    grid: &[Value],
    visit: &mut dyn FnMut(&FactBase, &BTreeMap<SortId, Vec<Value>>) -> bool,
) -> bool {
    let sorts: Vec<SortId> = sig.sort_ids().filter(|&s| sig.sort_kind(s) == SortKind::Uninterpreted).collect();
    let ranges: Vec<Vec<usize>> = sorts.iter().map(|s| (0..=max_new.get(s).copied().unwrap_or(0)).collect()).collect();
    let mut configs = vec![Vec::new()];
    for r in &ranges {
        configs = configs
            .into_iter()
            .flat_map(|c: Vec<usize>| {
                r.iter().map(move |&k| {
                    let mut c = c.clone();
                    c.push(k);
                    c
                })
            })
            .collect();
    }
    configs.sort_by_key(|c| c.iter().sum::<usize>());
    for config in configs {
        let mut carriers = m.carriers.clone();
        let mut base = m.to_factbase(sig);
        for (&s, &k) in sorts.iter().zip(&config) {
            for i in 0..k {
                let name = format!("{}_fresh{i}", sig.sort(s).name.to_lowercase());
                base.add_element(s, &name);
                carriers.get_mut(&s).unwrap().push(Value::Elem(name));
            }
        }
        for s in sig.sort_ids() {
            if sig.sort_kind(s) != SortKind::Uninterpreted {
                carriers.insert(s, grid.to_vec());
            }
        }
        // Open slots: tuples with at least one fresh argument.
        let is_old = |v: &Value, s: SortId| m.carriers[&s].contains(v);
        let mut fun_slots = Vec::new();
        for f in sig.fun_ids() {
            let decl = sig.function(f);
            for args in product(&decl.args.iter().map(|s| carriers[s].clone()).collect::<Vec<_>>()) {
                if !args.0.iter().zip(&decl.args).all(|(v, &s)| is_old(v, s)) {
                    fun_slots.push((f, args.0, carriers[&decl.result].clone()));
                }
            }
        }
        let mut pred_slots = Vec::new();
        for p in sig.pred_ids() {
            let decl = sig.predicate(p);
            for args in product(&decl.args.iter().map(|s| carriers[s].clone()).collect::<Vec<_>>()) {
                if !args.0.iter().zip(&decl.args).all(|(v, &s)| is_old(v, s)) {
                    pred_slots.push((p, args.0));
                }
            }
        }
        let radix: Vec<usize> = fun_slots.iter().map(|s| s.2.len()).chain(pred_slots.iter().map(|_| 2)).collect();
        let mut idx = vec![0usize; radix.len()];
        loop {
            let mut fb = base.clone();
            for (k, (f, args, dom)) in fun_slots.iter().enumerate() {
                fb.set_function(sig, *f, args.clone(), dom[idx[k]].clone()).unwrap();
            }
            for (k, (p, args)) in pred_slots.iter().enumerate() {
                fb.set_predicate(sig, *p, args.clone(), idx[fun_slots.len() + k] == 1).unwrap();
            }
            if visit(&fb, &carriers) {
                return true;
            }
            let mut i = 0;
            loop {
                if i == idx.len() {
                    break;
                }
                idx[i] += 1;
                if idx[i] < radix[i] {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == idx.len() {
                break;
            }
        }
    }
    false
}

/// A random trace over a finite model.
pub fn random_trace(rng: &mut impl Rng, sig: &Signature, m: &FiniteModel, len: usize) -> Trace {
    let choices = m.assignments(sig);
    Trace { facts: m.to_factbase(sig), assignments: (0..len).map(|_| choices.choose(rng).unwrap().clone()).collect() }
}

pub fn var(sig: &Signature, name: &str) -> VarId {
    sig.var_by_name(name).unwrap()
}
