mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use datamon::logic::parse::parse_signature;
use datamon::logic::property::Property;
use datamon::logic::semantics::eval_semantics;
use datamon::logic::signature::Signature;
use datamon::monitor::{compile, monitor, monitor_prefixes, CompileOptions, Verdict};
use datamon::theory::models::{enumerate_small_models, FiniteModel};
use datamon::theory::{BackendKind, TheoryConfig};

const SIG: &str = "(sort S) (const c S) (pred P (S)) (var x S) (var y S)";
const POOL: &[&str] = &["(= x c)", "(= x y)", "(P x)", "(P y)", "(= x (prev x))", "(P (prev y))"];
// A lookback literal is false in both polarities at the first instant, so
// duality is only checked without lookback.
const CURRENT_POOL: &[&str] = &["(= x c)", "(= x y)", "(P x)", "(P y)"];

struct Fixture {
    sig: Signature,
    models: Vec<FiniteModel>,
}

fn fixture() -> Fixture {
    let sig = parse_signature(SIG).unwrap();
    let (models, _) = enumerate_small_models(&sig, 3, 10_000);
    Fixture { sig, models }
}

fn sample(fx: &Fixture, pool: &[&str], seed: u64, depth: usize, atoms: usize, len: usize) -> (Property, datamon::monitor::Trace) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = lits(&fx.sig, pool);
    let p = random_property(&mut rng, &pool, depth, atoms);
    let m = fx.models.choose(&mut rng).unwrap();
    let tr = random_trace(&mut rng, &fx.sig, m, len);
    (p, tr)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn negation_is_dual(seed: u64, depth in 0usize..4, atoms in 1usize..5, len in 1usize..5) {
        let fx = fixture();
        let (p, tr) = sample(&fx, CURRENT_POOL, seed, depth, atoms, len);
        prop_assert_eq!(eval_semantics(&tr, &p).unwrap(), !eval_semantics(&tr, &p.negate()).unwrap());
    }

    #[test]
    fn normal_form_preserves_meaning(seed: u64, depth in 0usize..4, atoms in 1usize..6, len in 1usize..5) {
        let fx = fixture();
        let (p, tr) = sample(&fx, POOL, seed, depth, atoms, len);
        prop_assert_eq!(eval_semantics(&tr, &p).unwrap(), eval_semantics(&tr, &p.dnf()).unwrap());
    }

    #[test]
    fn verdicts_follow_the_prefix(seed: u64, depth in 0usize..4, atoms in 1usize..4, len in 1usize..5) {
        let fx = fixture();
        let (p, tr) = sample(&fx, POOL, seed, depth, atoms, len);
        let opts = CompileOptions { theory: TheoryConfig::new(BackendKind::Euf), ..Default::default() };
        let art = compile(&fx.sig, &p, &opts).unwrap();
        prop_assume!(art.safe_lookback);
        let vs = monitor_prefixes(&art, &tr).unwrap();
        prop_assert_eq!(vs.len(), tr.len());
        prop_assert_eq!(vs.last().unwrap(), &monitor(&art, &tr).unwrap());
        prop_assert_eq!(vs.last().unwrap().prefix_satisfied(), Some(eval_semantics(&tr, &p).unwrap()));
        // Permanent verdicts never change along the trace.
        if let Some(i) = vs.iter().position(Verdict::is_permanent) {
            prop_assert!(vs[i..].iter().all(|v| *v == vs[i]), "{:?}", vs);
        }
    }
}
