//! Direct finite-trace semantics of properties.

use super::property::Property;
use crate::monitor::facts::{eval_literal, Tri, Trace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("the trace is empty")]
    EmptyTrace,
    #[error("the fact base does not determine the property at instant {instant}")]
    InsufficientFacts { instant: usize },
}

/// Truth value of `p` at every instant of the trace, by backward induction.
pub fn eval_instants(tr: &Trace, p: &Property) -> Vec<Tri> {
    let n = tr.len();
    match p {
        Property::True => vec![Tri::True; n],
        Property::False => vec![Tri::False; n],
        Property::Lit(l) => (0..n).map(|i| eval_literal(l, &tr.facts, tr.env(i))).collect(),
        Property::And(ps) => ps.iter().fold(vec![Tri::True; n], |acc, q| {
            acc.into_iter().zip(eval_instants(tr, q)).map(|(a, b)| a.and(b)).collect()
        }),
        Property::Or(ps) => ps.iter().fold(vec![Tri::False; n], |acc, q| {
            acc.into_iter().zip(eval_instants(tr, q)).map(|(a, b)| a.or(b)).collect()
        }),
        Property::Next(q) | Property::WeakNext(q) => {
            let inner = eval_instants(tr, q);
            let last = if matches!(p, Property::Next(_)) { Tri::False } else { Tri::True };
            (0..n).map(|i| if i + 1 < n { inner[i + 1] } else { last }).collect()
        }
        Property::Until(a, b) | Property::Release(a, b) => {
            let (va, vb) = (eval_instants(tr, a), eval_instants(tr, b));
            let until = matches!(p, Property::Until(..));
            let mut out = vec![Tri::False; n];
            for i in (0..n).rev() {
                out[i] = if i + 1 == n {
                    vb[i]
                } else if until {
                    vb[i].or(va[i].and(out[i + 1]))
                } else {
                    vb[i].and(va[i].or(out[i + 1]))
                };
            }
            out
        }
    }
}

/// Whether the trace satisfies the property at its first instant.
pub fn eval_semantics(tr: &Trace, p: &Property) -> Result<bool, EvalError> {
    if tr.is_empty() {
        return Err(EvalError::EmptyTrace);
    }
    match eval_instants(tr, p)[0] {
        Tri::True => Ok(true),
        Tri::False => Ok(false),
        Tri::Unknown => Err(EvalError::InsufficientFacts { instant: 0 }),
    }
}
