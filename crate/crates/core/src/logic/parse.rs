//! Concrete syntax for signatures and properties.
//!
//! Signature file, one declaration per form:
//!
//! ```text
//! (sort Ticket)            (sort Real :rational)     (sort Count :integer)
//! (fun price (Ticket) Real)
//! (const myc Concert)
//! (pred Sold (Ticket))
//! (var t Ticket)
//! ```
//!
//! Property file, a single form:
//!
//! ```text
//! p := true | false | atom | (not p) | (and p...) | (or p...) | (implies p p)
//!    | (X p) | (Xw p) | (U p p) | (R p p) | (F p) | (G p)
//! atom := (= t t) | (distinct t t) | (< t t) | (<= t t) | (> t t) | (>= t t) | (P t...)
//! t := name | (prev v) | (f t...) | numeral | (+ t...) | (- t t) | (- t) | (* numeral t)
//! ```
//!
//! Numerals are integers, fractions `n/d` or decimals. Negation may be
//! written anywhere; it is pushed to the literals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::formula::Formula;
use super::property::Property;
use super::sexpr::{read_all, Pos, SExpr, SyntaxError};
use super::signature::{Signature, SignatureError, SortId, SortKind, Symbol};
use super::term::{Atom, Literal, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

impl From<SyntaxError> for ParseError {
    fn from(e: SyntaxError) -> Self {
        ParseError { pos: e.pos, msg: e.msg }
    }
}

fn err<T>(pos: Pos, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { pos, msg: msg.into() })
}

fn sig_err(pos: Pos, e: SignatureError) -> ParseError {
    ParseError { pos, msg: e.to_string() }
}

pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let mut sig = Signature::new();
    for form in read_all(text)? {
        let pos = form.pos();
        let Some(items) = form.as_list() else {
            return err(pos, format!("expected a declaration, found `{form}`"));
        };
        let head = form.head().unwrap_or("");
        let name = |i: usize| -> Result<&str, ParseError> {
            items
                .get(i)
                .and_then(SExpr::as_atom)
                .ok_or(ParseError { pos, msg: format!("malformed `{head}` declaration") })
        };
        let sort_ref = |sig: &Signature, e: Option<&SExpr>| -> Result<SortId, ParseError> {
            let e = e.ok_or(ParseError { pos, msg: format!("malformed `{head}` declaration") })?;
            let n = e
                .as_atom()
                .ok_or(ParseError { pos: e.pos(), msg: "expected a sort name".into() })?;
            sig.sort_by_name(n)
                .ok_or_else(|| sig_err(e.pos(), SignatureError::UnknownSort(n.to_string())))
        };
        let sort_list = |sig: &Signature, e: Option<&SExpr>| -> Result<Vec<SortId>, ParseError> {
            let e = e.ok_or(ParseError { pos, msg: format!("malformed `{head}` declaration") })?;
            let l = e
                .as_list()
                .ok_or(ParseError { pos: e.pos(), msg: "expected a list of argument sorts".into() })?;
            l.iter().map(|s| sort_ref(sig, Some(s))).collect()
        };
        match head {
            "sort" => {
                let kind = match items.get(2).and_then(SExpr::as_atom) {
                    None if items.len() == 2 => SortKind::Uninterpreted,
                    Some(":rational") | Some(":real") => SortKind::Rational,
                    Some(":integer") | Some(":int") => SortKind::Integer,
                    _ => return err(pos, "expected `(sort Name [:rational|:integer])`"),
                };
                sig.add_sort(name(1)?, kind).map_err(|e| sig_err(pos, e))?;
            }
            "fun" => {
                if items.len() != 4 {
                    return err(pos, "expected `(fun name (ArgSort...) ResultSort)`");
                }
                let args = sort_list(&sig, items.get(2))?;
                let result = sort_ref(&sig, items.get(3))?;
                sig.add_function(name(1)?, args, result).map_err(|e| sig_err(pos, e))?;
            }
            "const" => {
                if items.len() != 3 {
                    return err(pos, "expected `(const name Sort)`");
                }
                let s = sort_ref(&sig, items.get(2))?;
                sig.add_constant(name(1)?, s).map_err(|e| sig_err(pos, e))?;
            }
            "pred" => {
                if items.len() != 3 {
                    return err(pos, "expected `(pred name (ArgSort...))`");
                }
                let args = sort_list(&sig, items.get(2))?;
                sig.add_predicate(name(1)?, args).map_err(|e| sig_err(pos, e))?;
            }
            "var" => {
                if items.len() != 3 {
                    return err(pos, "expected `(var name Sort)`");
                }
                let s = sort_ref(&sig, items.get(2))?;
                sig.add_variable(name(1)?, s).map_err(|e| sig_err(pos, e))?;
            }
            other => return err(pos, format!("unknown declaration `{other}`")),
        }
    }
    sig.validate().map_err(|e| sig_err(Pos { line: 1, col: 1 }, e))?;
    Ok(sig)
}

pub fn parse_property(text: &str, sig: &Signature) -> Result<Property, ParseError> {
    let forms = read_all(text)?;
    match forms.as_slice() {
        [one] => Parser { sig }.property(one, true),
        [] => err(Pos { line: 1, col: 1 }, "empty property"),
        [_, second, ..] => err(second.pos(), "expected a single property form"),
    }
}

/// Parse a state constraint (a property without temporal operators).
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let p = parse_property(text, sig)?;
    p.as_formula()
        .ok_or(ParseError { pos: Pos { line: 1, col: 1 }, msg: "temporal operator in a state constraint".into() })
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let forms = read_all(text)?;
    let [one] = forms.as_slice() else {
        return err(Pos { line: 1, col: 1 }, "expected a single term");
    };
    let p = Parser { sig };
    let t = p.term(one)?;
    p.resolve(t, None, one.pos())
}

/// Parse a numeral: integer, `n/d` fraction or decimal.
pub fn parse_numeral(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((i, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = i.starts_with('-');
        let whole: BigInt = if i == "-" || i.is_empty() { BigInt::zero() } else { i.parse().ok()? };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let f: BigInt = frac.parse().ok()?;
        let mag = BigRational::new(f, scale);
        let w = BigRational::from_integer(whole);
        return Some(if neg { w - mag } else { w + mag });
    }
    let first = s.chars().next()?;
    if !(first.is_ascii_digit() || (first == '-' && s.len() > 1)) {
        return None;
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// A term whose sort may still be open (bare numerals).
enum PTerm {
    Typed(Term, SortId),
    Numeral(BigRational),
}

struct Parser<'a> {
    sig: &'a Signature,
}

impl Parser<'_> {
    fn property(&self, e: &SExpr, positive: bool) -> Result<Property, ParseError> {
        let pos = e.pos();
        if let Some(a) = e.as_atom() {
            return match a {
                "true" => Ok(if positive { Property::True } else { Property::False }),
                "false" => Ok(if positive { Property::False } else { Property::True }),
                _ => self.literal(e, positive).map(Property::lit),
            };
        }
        let items = e.as_list().unwrap();
        let Some(head) = e.head() else {
            return err(pos, "expected an operator");
        };
        let args = &items[1..];
        let arity = |n: usize| -> Result<(), ParseError> {
            if args.len() == n {
                Ok(())
            } else {
                err(pos, format!("`{head}` expects {n} argument(s), found {}", args.len()))
            }
        };
        let sub = |i: usize, p: bool| self.property(&args[i], p);
        match head {
            "not" | "!" => {
                arity(1)?;
                sub(0, !positive)
            }
            "and" | "or" => {
                let parts = args.iter().map(|a| self.property(a, positive)).collect::<Result<Vec<_>, _>>()?;
                if (head == "and") == positive {
                    Ok(Property::and(parts))
                } else {
                    Ok(Property::or(parts))
                }
            }
            "implies" | "=>" => {
                arity(2)?;
                if positive {
                    Ok(Property::or([sub(0, false)?, sub(1, true)?]))
                } else {
                    Ok(Property::and([sub(0, true)?, sub(1, false)?]))
                }
            }
            "X" => {
                arity(1)?;
                let p = sub(0, positive)?;
                Ok(if positive { Property::next(p) } else { Property::weak_next(p) })
            }
            "Xw" | "WX" => {
                arity(1)?;
                let p = sub(0, positive)?;
                Ok(if positive { Property::weak_next(p) } else { Property::next(p) })
            }
            "U" | "R" => {
                arity(2)?;
                let (a, b) = (sub(0, positive)?, sub(1, positive)?);
                Ok(if (head == "U") == positive { Property::until(a, b) } else { Property::release(a, b) })
            }
            "F" | "G" => {
                arity(1)?;
                let p = sub(0, positive)?;
                Ok(if (head == "F") == positive { Property::eventually(p) } else { Property::always(p) })
            }
            "exists" | "forall" => err(pos, "quantifiers unsupported"),
            _ => self.literal(e, positive).map(Property::lit),
        }
    }

    fn literal(&self, e: &SExpr, positive: bool) -> Result<Literal, ParseError> {
        let pos = e.pos();
        let (head, args): (&str, &[SExpr]) = match e {
            SExpr::Atom(a, _) => (a.as_str(), &[]),
            SExpr::List(items, _) => (e.head().unwrap_or(""), &items[1..]),
        };
        let binary = || -> Result<(PTerm, PTerm), ParseError> {
            if args.len() != 2 {
                return err(pos, format!("`{head}` expects 2 arguments, found {}", args.len()));
            }
            Ok((self.term(&args[0])?, self.term(&args[1])?))
        };
        let atom_pos = |atom: Atom, p: bool| Literal::new(atom, p == positive);
        match head {
            "=" | "distinct" | "!=" => {
                let (a, b) = binary()?;
                let (a, b) = self.unify(a, b, pos, false)?;
                Ok(atom_pos(Atom::eq(a, b), head == "="))
            }
            "<" | "<=" | ">" | ">=" => {
                let (a, b) = binary()?;
                let (a, b) = self.unify(a, b, pos, true)?;
                let atom = match head {
                    "<" => Atom::Lt(a, b),
                    "<=" => Atom::Le(a, b),
                    ">" => Atom::Lt(b, a),
                    _ => Atom::Le(b, a),
                };
                Ok(atom_pos(atom, true))
            }
            name => match self.sig.lookup(name) {
                Some(Symbol::Pred(p)) => {
                    let decl = self.sig.predicate(p);
                    if decl.args.len() != args.len() {
                        return err(pos, format!("predicate `{name}` expects {} argument(s)", decl.args.len()));
                    }
                    let mut ts = Vec::new();
                    for (a, &s) in args.iter().zip(&decl.args) {
                        let t = self.term(a)?;
                        ts.push(self.resolve(t, Some(s), a.pos())?);
                    }
                    Ok(atom_pos(Atom::Pred(p, ts), true))
                }
                Some(_) => err(pos, format!("`{name}` is not a predicate or a connective")),
                None => err(pos, format!("unknown symbol `{name}`")),
            },
        }
    }

    fn unify(&self, a: PTerm, b: PTerm, pos: Pos, order: bool) -> Result<(Term, Term), ParseError> {
        let sort = match (&a, &b) {
            (PTerm::Typed(_, s), _) | (_, PTerm::Typed(_, s)) => Some(*s),
            _ => None,
        };
        let a = self.resolve(a, sort, pos)?;
        let b = self.resolve(b, sort, pos)?;
        let (sa, sb) = (a.sort(self.sig), b.sort(self.sig));
        if sa != sb {
            return err(
                pos,
                format!("sort mismatch: `{}` vs `{}`", self.sig.sort(sa).name, self.sig.sort(sb).name),
            );
        }
        if order && !self.sig.sort_kind(sa).is_arithmetic() {
            return err(pos, format!("order comparison on non-arithmetic sort `{}`", self.sig.sort(sa).name));
        }
        Ok((a, b))
    }

    fn default_numeric_sort(&self, pos: Pos) -> Result<SortId, ParseError> {
        self.sig
            .arithmetic_sort(SortKind::Rational)
            .or_else(|| self.sig.arithmetic_sort(SortKind::Integer))
            .ok_or(ParseError { pos, msg: "numeral used without an arithmetic sort".into() })
    }

    fn resolve(&self, t: PTerm, sort: Option<SortId>, pos: Pos) -> Result<Term, ParseError> {
        match t {
            PTerm::Typed(t, s) => match sort {
                Some(want) if want != s => err(
                    pos,
                    format!("expected sort `{}`, found `{}`", self.sig.sort(want).name, self.sig.sort(s).name),
                ),
                _ => Ok(t),
            },
            PTerm::Numeral(r) => {
                let s = match sort {
                    Some(s) => s,
                    None => self.default_numeric_sort(pos)?,
                };
                match self.sig.sort_kind(s) {
                    SortKind::Uninterpreted => err(pos, format!("numeral at non-arithmetic sort `{}`", self.sig.sort(s).name)),
                    SortKind::Integer if !r.is_integer() => err(pos, "fractional numeral at integer sort"),
                    _ => Ok(Term::Num(r, s)),
                }
            }
        }
    }

    fn term(&self, e: &SExpr) -> Result<PTerm, ParseError> {
        let pos = e.pos();
        if let Some(a) = e.as_atom() {
            if let Some(r) = parse_numeral(a) {
                return Ok(PTerm::Numeral(r));
            }
            return match self.sig.lookup(a) {
                Some(Symbol::Var(v)) => Ok(PTerm::Typed(Term::Var(v), self.sig.var_sort(v))),
                Some(Symbol::Fun(f)) => {
                    let decl = self.sig.function(f);
                    if !decl.args.is_empty() {
                        return err(pos, format!("function `{a}` expects {} argument(s)", decl.args.len()));
                    }
                    Ok(PTerm::Typed(Term::constant(f), decl.result))
                }
                Some(_) => err(pos, format!("`{a}` is not a term")),
                None => err(pos, format!("unknown symbol `{a}`")),
            };
        }
        let items = e.as_list().unwrap();
        let Some(head) = e.head() else {
            return err(pos, "expected a term");
        };
        let args = &items[1..];
        match head {
            "prev" => {
                let [arg] = args else {
                    return err(pos, "`prev` expects one state variable");
                };
                match arg.as_atom().and_then(|n| self.sig.var_by_name(n)) {
                    Some(v) => Ok(PTerm::Typed(Term::Prev(v), self.sig.var_sort(v))),
                    None => err(arg.pos(), "`prev` applies to state variables only"),
                }
            }
            "+" | "-" => {
                if args.is_empty() || (head == "+" && args.len() < 2) {
                    return err(pos, format!("`{head}` needs more arguments"));
                }
                let mut parts: Vec<PTerm> = args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?;
                if head == "-" {
                    let start = if parts.len() == 1 { 0 } else { 1 };
                    for p in parts.iter_mut().skip(start) {
                        *p = negate_pterm(std::mem::replace(p, PTerm::Numeral(BigRational::zero())));
                    }
                }
                if parts.len() == 1 {
                    return Ok(parts.pop().unwrap());
                }
                let sort = parts.iter().find_map(|p| match p {
                    PTerm::Typed(_, s) => Some(*s),
                    _ => None,
                });
                match sort {
                    None => {
                        let mut acc = BigRational::zero();
                        for p in parts {
                            if let PTerm::Numeral(r) = p {
                                acc += r;
                            }
                        }
                        Ok(PTerm::Numeral(acc))
                    }
                    Some(s) => {
                        if !self.sig.sort_kind(s).is_arithmetic() {
                            return err(pos, "arithmetic on a non-arithmetic sort");
                        }
                        let ts = parts.into_iter().map(|p| self.resolve(p, Some(s), pos)).collect::<Result<_, _>>()?;
                        Ok(PTerm::Typed(Term::Add(ts), s))
                    }
                }
            }
            "*" => {
                let [a, b] = args else {
                    return err(pos, "`*` expects a numeral and a term");
                };
                match (self.term(a)?, self.term(b)?) {
                    (PTerm::Numeral(x), PTerm::Numeral(y)) => Ok(PTerm::Numeral(x * y)),
                    (PTerm::Numeral(c), PTerm::Typed(t, s)) | (PTerm::Typed(t, s), PTerm::Numeral(c)) => {
                        if !self.sig.sort_kind(s).is_arithmetic() {
                            return err(pos, "arithmetic on a non-arithmetic sort");
                        }
                        Ok(PTerm::Typed(Term::Scale(c, Box::new(t)), s))
                    }
                    _ => err(pos, "non-linear multiplication"),
                }
            }
            name => match self.sig.lookup(name) {
                Some(Symbol::Fun(f)) => {
                    let decl = self.sig.function(f);
                    if decl.args.len() != args.len() {
                        return err(pos, format!("function `{name}` expects {} argument(s)", decl.args.len()));
                    }
                    let mut ts = Vec::new();
                    for (a, &s) in args.iter().zip(&decl.args) {
                        let t = self.term(a)?;
                        ts.push(self.resolve(t, Some(s), a.pos())?);
                    }
                    Ok(PTerm::Typed(Term::App(f, ts), decl.result))
                }
                Some(_) => err(pos, format!("`{name}` is not a function")),
                None => err(pos, format!("unknown symbol `{name}`")),
            },
        }
    }
}

fn negate_pterm(p: PTerm) -> PTerm {
    let minus_one = -BigRational::one();
    match p {
        PTerm::Numeral(r) => PTerm::Numeral(-r),
        PTerm::Typed(Term::Scale(c, t), s) => PTerm::Typed(Term::Scale(-c, t), s),
        PTerm::Typed(t, s) => PTerm::Typed(Term::Scale(minus_one, Box::new(t)), s),
    }
}
