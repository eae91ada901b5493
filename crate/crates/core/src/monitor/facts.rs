//! Finite presentations of first-order models and three-valued ground
//! evaluation against them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::logic::formula::Formula;
use crate::logic::signature::{FunId, PredId, Signature, SortId, SortKind, VarId};
use crate::logic::term::{fmt_rational, Atom, Literal, Term};

/// A domain element: a named element of an uninterpreted sort or a number.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    Elem(String),
    Num(BigRational),
}

impl Value {
    pub fn num(v: i64) -> Value {
        Value::Num(BigRational::from_integer(v.into()))
    }

    pub fn elem(name: &str) -> Value {
        Value::Elem(name.to_string())
    }

    pub fn to_term(&self, sort: SortId) -> Term {
        match self {
            Value::Elem(n) => Term::Elem(n.clone(), sort),
            Value::Num(r) => Term::Num(r.clone(), sort),
        }
    }

    pub fn from_term(t: &Term) -> Option<Value> {
        match t {
            Term::Elem(n, _) => Some(Value::Elem(n.clone())),
            Term::Num(r, _) => Some(Value::Num(r.clone())),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Elem(n) => write!(f, "{n}"),
            Value::Num(r) => fmt_rational(r, f),
        }
    }
}

/// A total map from state variables to values, indexed by variable id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(pub Vec<Value>);

impl Assignment {
    pub fn get(&self, v: VarId) -> &Value {
        &self.0[v.0 as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FactError {
    #[error("conflicting facts for `{0}`")]
    Conflict(String),
    #[error("undeclared element `{0}`")]
    UnknownElement(String),
    #[error("value `{value}` does not belong to sort `{sort}`")]
    WrongSort { value: String, sort: String },
    #[error("`{0}` expects {1} argument(s)")]
    Arity(String, usize),
}

/// Ground facts describing the relevant part of a model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactBase {
    elements: BTreeMap<SortId, BTreeSet<String>>,
    functions: BTreeMap<(FunId, Vec<Value>), Value>,
    predicates: BTreeMap<(PredId, Vec<Value>), bool>,
    /// Unlisted predicate facts are false rather than unknown.
    pub closed_world: bool,
}

impl FactBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_element(&mut self, sort: SortId, name: &str) {
        self.elements.entry(sort).or_default().insert(name.to_string());
    }

    pub fn elements(&self, sort: SortId) -> impl Iterator<Item = &String> + '_ {
        self.elements.get(&sort).into_iter().flatten()
    }

    pub fn has_element(&self, sort: SortId, name: &str) -> bool {
        self.elements.get(&sort).is_some_and(|s| s.contains(name))
    }

    /// Check that `v` is a value of `sort`.
    pub fn check_value(&self, sig: &Signature, sort: SortId, v: &Value) -> Result<(), FactError> {
        let ok = match (sig.sort_kind(sort), v) {
            (SortKind::Uninterpreted, Value::Elem(n)) => {
                if !self.has_element(sort, n) {
                    return Err(FactError::UnknownElement(n.clone()));
                }
                true
            }
            (SortKind::Rational, Value::Num(_)) => true,
            (SortKind::Integer, Value::Num(r)) => r.is_integer(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(FactError::WrongSort { value: v.to_string(), sort: sig.sort(sort).name.clone() })
        }
    }

    pub fn set_function(&mut self, sig: &Signature, f: FunId, args: Vec<Value>, value: Value) -> Result<(), FactError> {
        let decl = sig.function(f);
        if decl.args.len() != args.len() {
            return Err(FactError::Arity(decl.name.clone(), decl.args.len()));
        }
        for (a, &s) in args.iter().zip(&decl.args) {
            self.check_value(sig, s, a)?;
        }
        self.check_value(sig, decl.result, &value)?;
        match self.functions.get(&(f, args.clone())) {
            Some(old) if *old != value => Err(FactError::Conflict(decl.name.clone())),
            _ => {
                self.functions.insert((f, args), value);
                Ok(())
            }
        }
    }

    pub fn set_predicate(&mut self, sig: &Signature, p: PredId, args: Vec<Value>, holds: bool) -> Result<(), FactError> {
        let decl = sig.predicate(p);
        if decl.args.len() != args.len() {
            return Err(FactError::Arity(decl.name.clone(), decl.args.len()));
        }
        for (a, &s) in args.iter().zip(&decl.args) {
            self.check_value(sig, s, a)?;
        }
        match self.predicates.get(&(p, args.clone())) {
            Some(old) if *old != holds => Err(FactError::Conflict(decl.name.clone())),
            _ => {
                self.predicates.insert((p, args), holds);
                Ok(())
            }
        }
    }

    pub fn function_value(&self, f: FunId, args: &[Value]) -> Option<&Value> {
        self.functions.get(&(f, args.to_vec()))
    }

    pub fn predicate_value(&self, p: PredId, args: &[Value]) -> Option<bool> {
        match self.predicates.get(&(p, args.to_vec())) {
            Some(&b) => Some(b),
            None if self.closed_world => Some(false),
            None => None,
        }
    }

    pub fn function_facts(&self) -> impl Iterator<Item = (&(FunId, Vec<Value>), &Value)> + '_ {
        self.functions.iter()
    }

    pub fn predicate_facts(&self) -> impl Iterator<Item = (&(PredId, Vec<Value>), &bool)> + '_ {
        self.predicates.iter()
    }

    /// Facts as ground literals over element terms, usable as theory axioms.
    pub fn as_literals(&self, sig: &Signature) -> Vec<Literal> {
        let mut out = Vec::new();
        for ((f, args), v) in &self.functions {
            let decl = sig.function(*f);
            let ts = args.iter().zip(&decl.args).map(|(a, &s)| a.to_term(s)).collect();
            out.push(Literal::eq(Term::App(*f, ts), v.to_term(decl.result)));
        }
        for ((p, args), holds) in &self.predicates {
            let decl = sig.predicate(*p);
            let ts = args.iter().zip(&decl.args).map(|(a, &s)| a.to_term(s)).collect();
            out.push(Literal::new(Atom::Pred(*p, ts), *holds));
        }
        out
    }
}

/// A finite trace: a fact base and a nonempty sequence of assignments.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub facts: FactBase,
    pub assignments: Vec<Assignment>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// The environment of instant `i`.
    pub fn env(&self, i: usize) -> Env<'_> {
        Env {
            prev: if i == 0 { None } else { Some(&self.assignments[i - 1]) },
            curr: &self.assignments[i],
        }
    }
}

/// Strong-Kleene truth values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    pub fn and(self, o: Tri) -> Tri {
        match (self, o) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    pub fn or(self, o: Tri) -> Tri {
        match (self, o) {
            (Tri::True, _) | (_, Tri::True) => Tri::True,
            (Tri::False, Tri::False) => Tri::False,
            _ => Tri::Unknown,
        }
    }

    pub fn not(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
        }
    }

    pub fn known(self) -> Option<bool> {
        match self {
            Tri::True => Some(true),
            Tri::False => Some(false),
            Tri::Unknown => None,
        }
    }
}

/// Values of the current and, except at instant 0, previous variables.
#[derive(Debug, Clone, Copy)]
pub struct Env<'a> {
    pub prev: Option<&'a Assignment>,
    pub curr: &'a Assignment,
}

enum TermValue {
    Val(Value),
    Unknown,
    /// A lookback term at the first instant.
    Undefined,
}

fn eval_term(t: &Term, facts: &FactBase, env: Env<'_>) -> TermValue {
    use TermValue::*;
    match t {
        Term::Num(r, _) => Val(Value::Num(r.clone())),
        Term::Elem(n, _) => Val(Value::Elem(n.clone())),
        Term::Var(v) => Val(env.curr.get(*v).clone()),
        Term::Prev(v) => match env.prev {
            Some(p) => Val(p.get(*v).clone()),
            None => Undefined,
        },
        Term::Aux(..) => Unknown,
        Term::App(f, args) => {
            let mut vals = Vec::with_capacity(args.len());
            let mut unknown = false;
            for a in args {
                match eval_term(a, facts, env) {
                    Val(v) => vals.push(v),
                    Undefined => return Undefined,
                    Unknown => unknown = true,
                }
            }
            if unknown {
                return Unknown;
            }
            match facts.function_value(*f, &vals) {
                Some(v) => Val(v.clone()),
                None => Unknown,
            }
        }
        Term::Add(args) => {
            let mut acc = BigRational::from_integer(0.into());
            let mut unknown = false;
            for a in args {
                match eval_term(a, facts, env) {
                    Val(Value::Num(r)) => acc += r,
                    Undefined => return Undefined,
                    _ => unknown = true,
                }
            }
            if unknown {
                Unknown
            } else {
                Val(Value::Num(acc))
            }
        }
        Term::Scale(c, t) => match eval_term(t, facts, env) {
            Val(Value::Num(r)) => Val(Value::Num(c * r)),
            Undefined => Undefined,
            _ => Unknown,
        },
    }
}

/// Evaluate a literal. Literals with a lookback term at instant 0 are false.
pub fn eval_literal(l: &Literal, facts: &FactBase, env: Env<'_>) -> Tri {
    let mut vals = Vec::new();
    let mut unknown = false;
    for t in l.atom.terms() {
        match eval_term(t, facts, env) {
            TermValue::Val(v) => vals.push(v),
            TermValue::Undefined => return Tri::False,
            TermValue::Unknown => unknown = true,
        }
    }
    if unknown {
        return Tri::Unknown;
    }
    let atom = match &l.atom {
        Atom::Eq(..) => Tri::from_bool(vals[0] == vals[1]),
        Atom::Le(..) | Atom::Lt(..) => match (&vals[0], &vals[1]) {
            (Value::Num(a), Value::Num(b)) => {
                Tri::from_bool(if matches!(l.atom, Atom::Lt(..)) { a < b } else { a <= b })
            }
            _ => Tri::Unknown,
        },
        Atom::Pred(p, _) => match facts.predicate_value(*p, &vals) {
            Some(b) => Tri::from_bool(b),
            None => Tri::Unknown,
        },
    };
    if l.positive {
        atom
    } else {
        atom.not()
    }
}

/// Three-valued evaluation of a state constraint.
pub fn eval_ground(f: &Formula, facts: &FactBase, env: Env<'_>) -> Tri {
    match f {
        Formula::True => Tri::True,
        Formula::False => Tri::False,
        Formula::Lit(l) => eval_literal(l, facts, env),
        Formula::And(fs) => {
            let mut acc = Tri::True;
            for g in fs {
                acc = acc.and(eval_ground(g, facts, env));
                if acc == Tri::False {
                    break;
                }
            }
            acc
        }
        Formula::Or(fs) => {
            let mut acc = Tri::False;
            for g in fs {
                acc = acc.or(eval_ground(g, facts, env));
                if acc == Tri::True {
                    break;
                }
            }
            acc
        }
    }
}
