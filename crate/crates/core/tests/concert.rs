use std::path::PathBuf;

use datamon::logic::parse::{parse_property, parse_signature};
use datamon::logic::signature::Signature;
use datamon::monitor::trace_io::parse_trace;
use datamon::monitor::{compile, monitor, monitor_prefixes, CompileOptions, Trace, Verdict};

fn corpus(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/concert").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn setup(trace: &str) -> (Signature, Trace) {
    let sig = parse_signature(&corpus("concert.sig")).unwrap();
    let tr = parse_trace(&sig, &corpus(trace)).unwrap();
    (sig, tr)
}

fn verdict(prop: &str, trace: &str) -> Vec<Verdict> {
    let (sig, tr) = setup(trace);
    let p = parse_property(&corpus(prop), &sig).unwrap();
    let art = compile(&sig, &p, &CompileOptions::default()).unwrap();
    assert!(!art.degraded(), "{:?}", art.divergence());
    assert!(art.safe_lookback);
    monitor_prefixes(&art, &tr).unwrap()
}

#[test]
fn best_ticket_is_currently_satisfied() {
    let vs = verdict("psi.prop", "traces/ex3_price80.json");
    assert_eq!(vs.last(), Some(&Verdict::Cs), "{vs:?}");
    // A single instant leaves the strong next unmet.
    assert_eq!(vs, vec![Verdict::Cv, Verdict::Cs, Verdict::Cs, Verdict::Cs, Verdict::Cs]);
}

#[test]
fn cheap_target_ticket_can_still_be_chosen() {
    let vs = verdict("psi_t123.prop", "traces/ex3_price80.json");
    assert_eq!(vs.last(), Some(&Verdict::Cv), "{vs:?}");
}

#[test]
fn expensive_target_ticket_is_lost() {
    let vs = verdict("psi_t123.prop", "traces/ex3_price100.json");
    assert_eq!(vs.last(), Some(&Verdict::Pv), "{vs:?}");
}

#[test]
fn semantics_agree_on_the_trace() {
    let (sig, tr) = setup("traces/ex3_price80.json");
    let psi = parse_property(&corpus("psi.prop"), &sig).unwrap();
    assert!(datamon::logic::semantics::eval_semantics(&tr, &psi).unwrap());
    let art = compile(&sig, &psi, &CompileOptions::default()).unwrap();
    assert_eq!(monitor(&art, &tr).unwrap(), Verdict::Cs);
}
