//! SMT-LIB solver driven over a child process's standard streams.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::logic::formula::Formula;
use crate::logic::parse::parse_numeral;
use crate::logic::sexpr::{read_all, SExpr};
use crate::logic::signature::{FunId, PredId, Signature, SortId, SortKind, VarId};
use crate::logic::term::{Atom, Literal, Term};

use super::{Theory, TheoryError};

const END_MARK: &str = "@@datamon-end";

/// Client for an external solver such as `z3 -in`. One query at a time;
/// the solver is reset between queries.
pub struct External {
    sig: Signature,
    command: String,
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    timeout: Option<Duration>,
}

impl Drop for External {
    fn drop(&mut self) {
        let _ = writeln!(self.stdin, "(exit)");
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn sort_name(sig: &Signature, s: SortId) -> String {
    match sig.sort_kind(s) {
        SortKind::Uninterpreted => format!("|S!{}|", sig.sort(s).name),
        SortKind::Rational => "Real".into(),
        SortKind::Integer => "Int".into(),
    }
}

fn fun_name(sig: &Signature, f: FunId) -> String {
    format!("|F!{}|", sig.function(f).name)
}

fn pred_name(sig: &Signature, p: PredId) -> String {
    format!("|P!{}|", sig.predicate(p).name)
}

fn var_name(sig: &Signature, v: VarId, prev: bool) -> String {
    format!("|{}!{}|", if prev { "W" } else { "V" }, sig.variable(v).name)
}

fn elem_name(sig: &Signature, name: &str, s: SortId) -> String {
    format!("|E!{}!{}|", sig.sort(s).name, name)
}

fn numeral(r: &BigRational, kind: SortKind) -> String {
    let mag = |n: &BigInt| {
        if kind == SortKind::Integer {
            n.abs().to_string()
        } else {
            format!("{}.0", n.abs())
        }
    };
    let body = if r.denom().is_one() {
        mag(r.numer())
    } else {
        format!("(/ {} {})", mag(r.numer()), mag(r.denom()))
    };
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

/// Declarations needed for a set of formulas.
#[derive(Default)]
struct Decls {
    vars: BTreeSet<(VarId, bool)>,
    aux: BTreeMap<u32, SortId>,
    elems: BTreeMap<SortId, BTreeSet<String>>,
}

impl Decls {
    fn term(&mut self, t: &Term) {
        match t {
            Term::Var(v) => {
                self.vars.insert((*v, false));
            }
            Term::Prev(v) => {
                self.vars.insert((*v, true));
            }
            Term::Aux(i, s) => {
                self.aux.insert(*i, *s);
            }
            Term::Elem(n, s) => {
                self.elems.entry(*s).or_default().insert(n.clone());
            }
            _ => t.children().iter().for_each(|c| self.term(c)),
        }
    }

    fn formula(&mut self, f: &Formula) {
        f.visit_literals(&mut |l| l.atom.terms().into_iter().for_each(|t| self.term(t)));
    }
}

pub(crate) fn term_to_smt(sig: &Signature, t: &Term) -> String {
    match t {
        Term::Num(r, s) => numeral(r, sig.sort_kind(*s)),
        Term::Elem(n, s) => elem_name(sig, n, *s),
        Term::Var(v) => var_name(sig, *v, false),
        Term::Prev(v) => var_name(sig, *v, true),
        Term::Aux(i, _) => format!("|A!{i}|"),
        Term::App(f, args) => {
            if args.is_empty() {
                fun_name(sig, *f)
            } else {
                let a: Vec<String> = args.iter().map(|a| term_to_smt(sig, a)).collect();
                format!("({} {})", fun_name(sig, *f), a.join(" "))
            }
        }
        Term::Add(args) => {
            let a: Vec<String> = args.iter().map(|a| term_to_smt(sig, a)).collect();
            format!("(+ {})", a.join(" "))
        }
        Term::Scale(c, t) => format!("(* {} {})", numeral(c, sig.sort_kind(t.sort(sig))), term_to_smt(sig, t)),
    }
}

pub(crate) fn literal_to_smt(sig: &Signature, l: &Literal) -> String {
    let atom = match &l.atom {
        Atom::Eq(a, b) => format!("(= {} {})", term_to_smt(sig, a), term_to_smt(sig, b)),
        Atom::Le(a, b) => format!("(<= {} {})", term_to_smt(sig, a), term_to_smt(sig, b)),
        Atom::Lt(a, b) => format!("(< {} {})", term_to_smt(sig, a), term_to_smt(sig, b)),
        Atom::Pred(p, args) if args.is_empty() => pred_name(sig, *p),
        Atom::Pred(p, args) => {
            let a: Vec<String> = args.iter().map(|a| term_to_smt(sig, a)).collect();
            format!("({} {})", pred_name(sig, *p), a.join(" "))
        }
    };
    if l.positive {
        atom
    } else {
        format!("(not {atom})")
    }
}

pub fn formula_to_smt(sig: &Signature, f: &Formula) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Lit(l) => literal_to_smt(sig, l),
        Formula::And(fs) | Formula::Or(fs) => {
            let op = if matches!(f, Formula::And(_)) { "and" } else { "or" };
            let parts: Vec<String> = fs.iter().map(|g| formula_to_smt(sig, g)).collect();
            format!("({op} {})", parts.join(" "))
        }
    }
}

impl External {
    /// Start the solver process. `command` is split on whitespace.
    pub fn spawn(sig: &Signature, command: &str, timeout: Option<Duration>) -> Result<Self, TheoryError> {
        let mut parts = command.split_whitespace();
        let prog = parts.next().ok_or_else(|| TheoryError::Solver("empty solver command".into()))?;
        let mut child = Command::new(prog)
            .args(parts)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| TheoryError::Solver(format!("cannot start `{command}`: {e}")))?;
        let stdin = child.stdin.take().unwrap();
        let stdout = child.stdout.take().unwrap();
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(External { sig: sig.clone(), command: command.to_string(), child, stdin, lines: rx, timeout })
    }

    fn preamble(&self, formulas: &[&Formula], bound: &[Term]) -> String {
        let sig = &self.sig;
        let mut d = Decls::default();
        for f in formulas {
            d.formula(f);
        }
        let mut out = String::from("(reset)\n");
        if let Some(t) = self.timeout {
            out += &format!("(set-option :timeout {})\n", t.as_millis());
        }
        for s in sig.sort_ids() {
            if sig.sort_kind(s) == SortKind::Uninterpreted {
                out += &format!("(declare-sort {} 0)\n", sort_name(sig, s));
            }
        }
        for f in sig.fun_ids() {
            let decl = sig.function(f);
            let args: Vec<String> = decl.args.iter().map(|&a| sort_name(sig, a)).collect();
            out += &format!("(declare-fun {} ({}) {})\n", fun_name(sig, f), args.join(" "), sort_name(sig, decl.result));
        }
        for p in sig.pred_ids() {
            let args: Vec<String> = sig.predicate(p).args.iter().map(|&a| sort_name(sig, a)).collect();
            out += &format!("(declare-fun {} ({}) Bool)\n", pred_name(sig, p), args.join(" "));
        }
        for &(v, prev) in &d.vars {
            if bound.contains(&if prev { Term::Prev(v) } else { Term::Var(v) }) {
                continue;
            }
            out += &format!("(declare-const {} {})\n", var_name(sig, v, prev), sort_name(sig, sig.var_sort(v)));
        }
        for (&i, &s) in &d.aux {
            if bound.contains(&Term::Aux(i, s)) {
                continue;
            }
            out += &format!("(declare-const |A!{i}| {})\n", sort_name(sig, s));
        }
        for (&s, names) in &d.elems {
            let ns: Vec<String> = names.iter().map(|n| elem_name(sig, n, s)).collect();
            for n in &ns {
                out += &format!("(declare-const {n} {})\n", sort_name(sig, s));
            }
            if ns.len() > 1 {
                out += &format!("(assert (distinct {}))\n", ns.join(" "));
            }
        }
        out
    }

    fn binder(&self, ys: &[Term]) -> String {
        let parts: Vec<String> = ys
            .iter()
            .map(|y| format!("({} {})", term_to_smt(&self.sig, y), sort_name(&self.sig, y.sort(&self.sig))))
            .collect();
        parts.join(" ")
    }

    /// Send a script and collect the reply lines up to the end marker.
    fn run(&mut self, script: &str) -> Result<Vec<String>, TheoryError> {
        let io = |e: std::io::Error| TheoryError::Solver(format!("`{}`: {e}", self.command));
        self.stdin.write_all(script.as_bytes()).map_err(io)?;
        writeln!(self.stdin, "(echo \"{END_MARK}\")").map_err(io)?;
        self.stdin.flush().map_err(io)?;
        let wait = self.timeout.map(|t| t + Duration::from_secs(5)).unwrap_or(Duration::from_secs(3600));
        let mut out = Vec::new();
        loop {
            match self.lines.recv_timeout(wait) {
                Ok(line) if line.trim() == END_MARK => return Ok(out),
                Ok(line) => out.push(line),
                Err(RecvTimeoutError::Timeout) => {
                    let _ = self.child.kill();
                    return Err(TheoryError::Resource("external solver did not answer in time".into()));
                }
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(TheoryError::Solver(format!("`{}` exited", self.command)));
                }
            }
        }
    }

    fn check(&mut self, assertion: &str, formulas: &[&Formula], bound: &[Term]) -> Result<bool, TheoryError> {
        let script = format!("{}(assert {assertion})\n(check-sat)\n", self.preamble(formulas, bound));
        let reply = self.run(&script)?;
        if let Some(e) = reply.iter().find(|l| l.starts_with("(error")) {
            return Err(TheoryError::Solver(e.clone()));
        }
        match reply.last().map(|s| s.trim()) {
            Some("sat") => Ok(true),
            Some("unsat") => Ok(false),
            Some("unknown") => Err(TheoryError::Resource("external solver answered unknown".into())),
            other => Err(TheoryError::Solver(format!("unexpected reply {other:?}"))),
        }
    }

    /// Whether `g` is equivalent to `∃ ys. f`, decided by the solver itself.
    pub fn is_equivalent_to_exists(&mut self, g: &Formula, ys: &[Term], f: &Formula) -> Result<bool, TheoryError> {
        let ex = if ys.is_empty() {
            formula_to_smt(&self.sig, f)
        } else {
            format!("(exists ({}) {})", self.binder(ys), formula_to_smt(&self.sig, f))
        };
        let assertion = format!("(not (= {} {ex}))", formula_to_smt(&self.sig, g));
        // declare the bound variables only where they occur free (in g)
        let script = format!("{}(assert {assertion})\n(check-sat)\n", self.preamble(&[g, f], &[]));
        let reply = self.run(&script)?;
        if let Some(e) = reply.iter().find(|l| l.starts_with("(error")) {
            return Err(TheoryError::Solver(e.clone()));
        }
        match reply.last().map(|s| s.trim()) {
            Some("unsat") => Ok(true),
            Some("sat") => Ok(false),
            Some("unknown") => Err(TheoryError::Resource("external solver answered unknown".into())),
            other => Err(TheoryError::Solver(format!("unexpected reply {other:?}"))),
        }
    }
}

impl Theory for External {
    fn name(&self) -> String {
        format!("external:{}", self.command)
    }

    fn is_satisfiable(&mut self, f: &Formula) -> Result<bool, TheoryError> {
        match f {
            Formula::True => return Ok(true),
            Formula::False => return Ok(false),
            _ => {}
        }
        let a = formula_to_smt(&self.sig, f);
        self.check(&a, &[f], &[])
    }

    fn qe(&mut self, ys: &[Term], f: &Formula) -> Result<Formula, TheoryError> {
        let ys: Vec<Term> = ys.iter().filter(|y| f.mentions(y)).cloned().collect();
        if ys.is_empty() {
            return Ok(f.clone());
        }
        let body = format!("(exists ({}) {})", self.binder(&ys), formula_to_smt(&self.sig, f));
        let script = format!("{}(assert {body})\n(apply (then qe simplify))\n", self.preamble(&[f], &ys));
        let reply = self.run(&script)?.join("\n");
        if reply.contains("(error") {
            return Err(TheoryError::Solver(reply));
        }
        let forms = read_all(&reply).map_err(|e| TheoryError::Solver(format!("unparsable reply: {e}")))?;
        let goals = forms
            .iter()
            .find(|e| e.head() == Some("goals"))
            .ok_or_else(|| TheoryError::Solver(format!("unexpected reply `{reply}`")))?;
        let mut reader = Reader { sig: &self.sig, names: self.name_table(&ys), lets: Vec::new() };
        let mut disjuncts = Vec::new();
        for goal in &goals.as_list().unwrap()[1..] {
            let items = goal.as_list().unwrap_or(&[]);
            let mut conj = Vec::new();
            for e in items.iter().skip(1) {
                if e.as_atom().is_some_and(|a| a.starts_with(':')) {
                    break;
                }
                conj.push(reader.formula(e)?);
            }
            disjuncts.push(Formula::and(conj));
        }
        Ok(Formula::or(disjuncts))
    }
}

impl External {
    fn name_table(&self, ys: &[Term]) -> HashMap<String, Term> {
        let sig = &self.sig;
        let mut m = HashMap::new();
        for v in sig.var_ids() {
            m.insert(var_name(sig, v, false), Term::Var(v));
            m.insert(var_name(sig, v, true), Term::Prev(v));
        }
        for f in sig.fun_ids() {
            if sig.function(f).args.is_empty() {
                m.insert(fun_name(sig, f), Term::constant(f));
            }
        }
        for y in ys {
            m.insert(term_to_smt(sig, y), y.clone());
        }
        m
    }
}

/// Converts solver output back into formulas.
struct Reader<'a> {
    sig: &'a Signature,
    names: HashMap<String, Term>,
    lets: Vec<HashMap<String, SExpr>>,
}

enum Num {
    Term(Term),
    Lit(BigRational),
}

/// Solvers print symbols without bars when the bars are not needed.
fn quoted(a: &str) -> String {
    if a.starts_with('|') {
        a.to_string()
    } else {
        format!("|{a}|")
    }
}

fn unsupported(e: &SExpr) -> TheoryError {
    TheoryError::Unsupported(format!("cannot read solver output `{e}`"))
}

impl Reader<'_> {
    fn lookup_let(&self, name: &str) -> Option<SExpr> {
        self.lets.iter().rev().find_map(|m| m.get(name).cloned())
    }

    fn formula(&mut self, e: &SExpr) -> Result<Formula, TheoryError> {
        if let Some(a) = e.as_atom() {
            return match a {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                _ => match self.lookup_let(a) {
                    Some(x) => self.formula(&x),
                    None => self.atom(e),
                },
            };
        }
        let items = e.as_list().unwrap();
        match e.head() {
            Some("and") => items[1..].iter().map(|x| self.formula(x)).collect::<Result<Vec<_>, _>>().map(Formula::and),
            Some("or") => items[1..].iter().map(|x| self.formula(x)).collect::<Result<Vec<_>, _>>().map(Formula::or),
            Some("not") if items.len() == 2 => Ok(self.formula(&items[1])?.negate()),
            Some("=>") if items.len() == 3 => Ok(Formula::or([self.formula(&items[1])?.negate(), self.formula(&items[2])?])),
            Some("let") if items.len() == 3 => {
                let mut scope = HashMap::new();
                for b in items[1].as_list().ok_or_else(|| unsupported(e))? {
                    let pair = b.as_list().ok_or_else(|| unsupported(e))?;
                    let name = pair.first().and_then(SExpr::as_atom).ok_or_else(|| unsupported(e))?;
                    scope.insert(name.to_string(), pair[1].clone());
                }
                self.lets.push(scope);
                let r = self.formula(&items[2]);
                self.lets.pop();
                r
            }
            _ => self.atom(e),
        }
    }

    fn atom(&mut self, e: &SExpr) -> Result<Formula, TheoryError> {
        let items = match e.as_list() {
            Some(items) => items,
            None => return Err(unsupported(e)),
        };
        let head = e.head().ok_or_else(|| unsupported(e))?;
        let two = || -> Result<(&SExpr, &SExpr), TheoryError> {
            if items.len() == 3 {
                Ok((&items[1], &items[2]))
            } else {
                Err(unsupported(e))
            }
        };
        match head {
            "=" | "distinct" | "<" | "<=" | ">" | ">=" => {
                let (a, b) = two()?;
                let (a, b) = self.pair(a, b)?;
                let lit = match head {
                    "=" => Literal::eq(a, b),
                    "distinct" => Literal::neq(a, b),
                    "<" => Literal::lt(a, b),
                    "<=" => Literal::le(a, b),
                    ">" => Literal::lt(b, a),
                    _ => Literal::le(b, a),
                };
                Ok(Formula::lit(lit))
            }
            name => {
                let p = self
                    .sig
                    .pred_ids()
                    .find(|&p| pred_name(self.sig, p) == quoted(name))
                    .ok_or_else(|| unsupported(e))?;
                let sorts = self.sig.predicate(p).args.clone();
                let mut args = Vec::new();
                for (x, s) in items[1..].iter().zip(sorts) {
                    args.push(self.typed(x, s)?);
                }
                Ok(Formula::lit(Literal::pos(Atom::Pred(p, args))))
            }
        }
    }

    fn pair(&mut self, a: &SExpr, b: &SExpr) -> Result<(Term, Term), TheoryError> {
        match (self.term(a)?, self.term(b)?) {
            (Num::Term(x), Num::Term(y)) => Ok((x, y)),
            (Num::Term(x), Num::Lit(r)) => {
                let s = x.sort(self.sig);
                Ok((x, Term::Num(r, s)))
            }
            (Num::Lit(r), Num::Term(y)) => {
                let s = y.sort(self.sig);
                Ok((Term::Num(r, s), y))
            }
            (Num::Lit(r1), Num::Lit(r2)) => {
                let s = self
                    .sig
                    .arithmetic_sort(SortKind::Rational)
                    .or_else(|| self.sig.arithmetic_sort(SortKind::Integer))
                    .ok_or_else(|| unsupported(a))?;
                Ok((Term::Num(r1, s), Term::Num(r2, s)))
            }
        }
    }

    fn typed(&mut self, e: &SExpr, s: SortId) -> Result<Term, TheoryError> {
        match self.term(e)? {
            Num::Term(t) => Ok(t),
            Num::Lit(r) => Ok(Term::Num(r, s)),
        }
    }

    fn term(&mut self, e: &SExpr) -> Result<Num, TheoryError> {
        if let Some(a) = e.as_atom() {
            if let Some(x) = self.lookup_let(a) {
                return self.term(&x);
            }
            if let Some(r) = parse_numeral(a) {
                return Ok(Num::Lit(r));
            }
            let a = quoted(a);
            if let Some(t) = self.names.get(&a) {
                return Ok(Num::Term(t.clone()));
            }
            if let Some(rest) = a.strip_prefix("|E!").and_then(|r| r.strip_suffix('|')) {
                if let Some((sort, name)) = rest.split_once('!') {
                    if let Some(s) = self.sig.sort_by_name(sort) {
                        return Ok(Num::Term(Term::Elem(name.to_string(), s)));
                    }
                }
            }
            return Err(unsupported(e));
        }
        let items = e.as_list().unwrap();
        let head = e.head().ok_or_else(|| unsupported(e))?;
        let args = &items[1..];
        match head {
            "-" if args.len() == 1 => Ok(match self.term(&args[0])? {
                Num::Lit(r) => Num::Lit(-r),
                Num::Term(t) => Num::Term(Term::Scale(-BigRational::one(), Box::new(t))),
            }),
            "/" if args.len() == 2 => match (self.term(&args[0])?, self.term(&args[1])?) {
                (Num::Lit(a), Num::Lit(b)) if !b.is_zero() => Ok(Num::Lit(a / b)),
                _ => Err(unsupported(e)),
            },
            "+" | "-" | "*" => {
                let mut parts = Vec::new();
                for a in args {
                    parts.push(self.term(a)?);
                }
                let sort = parts.iter().find_map(|p| match p {
                    Num::Term(t) => Some(t.sort(self.sig)),
                    Num::Lit(_) => None,
                });
                if head == "*" {
                    let mut coef = BigRational::one();
                    let mut rest = Vec::new();
                    for p in parts {
                        match p {
                            Num::Lit(r) => coef *= r,
                            Num::Term(t) => rest.push(t),
                        }
                    }
                    return match rest.len() {
                        0 => Ok(Num::Lit(coef)),
                        1 => Ok(Num::Term(Term::Scale(coef, Box::new(rest.pop().unwrap())))),
                        _ => Err(unsupported(e)),
                    };
                }
                let Some(s) = sort else {
                    let mut acc = BigRational::zero();
                    for (i, p) in parts.into_iter().enumerate() {
                        if let Num::Lit(r) = p {
                            if head == "-" && i > 0 {
                                acc -= r;
                            } else {
                                acc += r;
                            }
                        }
                    }
                    return Ok(Num::Lit(acc));
                };
                let mut ts = Vec::new();
                for (i, p) in parts.into_iter().enumerate() {
                    let t = match p {
                        Num::Lit(r) => Term::Num(r, s),
                        Num::Term(t) => t,
                    };
                    ts.push(if head == "-" && i > 0 { Term::Scale(-BigRational::one(), Box::new(t)) } else { t });
                }
                Ok(Num::Term(Term::Add(ts)))
            }
            name => {
                let f = self
                    .sig
                    .fun_ids()
                    .find(|&f| fun_name(self.sig, f) == quoted(name))
                    .ok_or_else(|| unsupported(e))?;
                let sorts = self.sig.function(f).args.clone();
                let mut ts = Vec::new();
                for (x, s) in args.iter().zip(sorts) {
                    ts.push(self.typed(x, s)?);
                }
                Ok(Num::Term(Term::App(f, ts)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::{parse_formula, parse_signature};

    fn solver_available() -> bool {
        Command::new("z3").arg("-version").output().is_ok()
    }

    #[test]
    fn prints_smtlib() {
        let sig = parse_signature("(sort S) (sort Real :rational) (fun p (S) Real) (var x S)").unwrap();
        let f = parse_formula("(< (p (prev x)) -1/2)", &sig).unwrap();
        assert_eq!(formula_to_smt(&sig, &f), "(< (|F!p| |W!x|) (- (/ 1.0 2.0)))");
    }

    #[test]
    fn round_trip_with_solver() {
        if !solver_available() {
            return;
        }
        let sig = parse_signature("(sort Real :rational) (var x Real) (var y Real) (var z Real)").unwrap();
        let mut ext = External::spawn(&sig, "z3 -in", Some(Duration::from_secs(10))).unwrap();
        let f = parse_formula("(and (< x y) (< y z))", &sig).unwrap();
        assert!(ext.is_satisfiable(&f).unwrap());
        let y = Term::Var(sig.var_by_name("y").unwrap());
        let q = ext.qe(&[y.clone()], &f).unwrap();
        let want = parse_formula("(< x z)", &sig).unwrap();
        assert!(ext.are_equivalent(&q, &want).unwrap());
        assert!(ext.is_equivalent_to_exists(&want, &[y], &f).unwrap());
    }
}
