//! Compilation of a property into the artifacts used for monitoring, and an
//! on-disk cache keyed by a content digest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::automaton::{AutomatonError, Nfa, DEFAULT_MAX_STATES};
use crate::coreach::{build_cg, CgOptions, CoreachError, CoreachGraph, Divergence, Polarity, DEFAULT_MAX_NODES};
use crate::logic::formula::Formula;
use crate::logic::property::Property;
use crate::logic::signature::Signature;
use crate::theory::{TheoryConfig, TheoryError};

/// Bumped whenever the serialized layout changes.
pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileOptions {
    pub theory: TheoryConfig,
    pub max_states: usize,
    pub max_nodes: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { theory: TheoryConfig::default(), max_states: DEFAULT_MAX_STATES, max_nodes: DEFAULT_MAX_NODES }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileStats {
    pub nfa_states: usize,
    pub nfa_transitions: usize,
    pub cg_pos_nodes: usize,
    pub cg_neg_nodes: usize,
    /// Wall-clock compilation time in milliseconds.
    pub t_pre_ms: f64,
}

/// Everything needed to monitor traces against one property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compiled {
    pub version: u32,
    pub digest: String,
    pub signature: Signature,
    pub property: Property,
    pub backend: String,
    pub nfa: Nfa,
    pub safe_lookback: bool,
    pub cg_pos: CoreachGraph,
    pub cg_neg: CoreachGraph,
    /// Per automaton state: disjunction of all positive graph nodes there.
    pub ext_sat: Vec<Formula>,
    /// Per automaton state: disjunction of all negative graph nodes there.
    pub ext_viol: Vec<Formula>,
    /// Per automaton state: condition for some non-empty continuation to
    /// end in acceptance.
    pub sat_cont: Vec<Formula>,
    /// Per automaton state: condition for some non-empty continuation to
    /// end in rejection.
    pub viol_cont: Vec<Formula>,
    pub stats: CompileStats,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("cache: {0}")]
    Cache(String),
}

impl From<CoreachError> for CompileError {
    fn from(e: CoreachError) -> Self {
        match e {
            CoreachError::Theory(t) => CompileError::Theory(t),
        }
    }
}

impl Compiled {
    /// True when a graph did not reach its fixpoint; verdicts then only
    /// describe the prefix.
    pub fn degraded(&self) -> bool {
        !self.cg_pos.is_complete() || !self.cg_neg.is_complete()
    }

    pub fn divergence(&self) -> Option<&Divergence> {
        self.cg_pos.divergence.as_ref().or(self.cg_neg.divergence.as_ref())
    }
}

/// Content digest of the inputs that determine the artifacts.
pub fn digest(sig: &Signature, p: &Property, opts: &CompileOptions) -> String {
    let payload = serde_json::json!({
        "version": ARTIFACT_VERSION,
        "signature": sig,
        "property": p,
        "backend": opts.theory.backend.label(),
        "max_states": opts.max_states,
        "max_nodes": opts.max_nodes,
    });
    hex::encode(Sha256::digest(payload.to_string().as_bytes()))
}

pub fn compile(sig: &Signature, p: &Property, opts: &CompileOptions) -> Result<Compiled, CompileError> {
    let start = Instant::now();
    let mut th = opts.theory.instantiate(sig)?;
    let nfa = Nfa::build(p, Some(th.as_mut()), opts.max_states)?;
    let cg_opts = CgOptions { max_nodes: opts.max_nodes, ..Default::default() };
    let cg_pos = build_cg(sig, &nfa, th.as_mut(), Polarity::Positive, cg_opts)?;
    let cg_neg = build_cg(sig, &nfa, th.as_mut(), Polarity::Negative, cg_opts)?;
    let states = 0..nfa.num_states();
    let ext_sat = states.clone().map(|q| cg_pos.ext_formula(q)).collect();
    let ext_viol = states.clone().map(|q| cg_neg.ext_formula(q)).collect();
    let sat_cont = states.clone().map(|q| cg_pos.continuation_formula(&nfa, q)).collect();
    let viol_cont = states.map(|q| cg_neg.continuation_formula(&nfa, q)).collect();
    let stats = CompileStats {
        nfa_states: nfa.num_states(),
        nfa_transitions: nfa.transitions.len(),
        cg_pos_nodes: cg_pos.nodes.len(),
        cg_neg_nodes: cg_neg.nodes.len(),
        t_pre_ms: start.elapsed().as_secs_f64() * 1000.0,
    };
    Ok(Compiled {
        version: ARTIFACT_VERSION,
        digest: digest(sig, p, opts),
        signature: sig.clone(),
        property: p.clone(),
        backend: opts.theory.backend.label(),
        safe_lookback: nfa.check_safe_lookback(),
        nfa,
        cg_pos,
        cg_neg,
        ext_sat,
        ext_viol,
        sat_cont,
        viol_cont,
        stats,
    })
}

pub fn cache_path(dir: &Path, digest: &str) -> PathBuf {
    dir.join(format!("{digest}.json"))
}

pub fn save(dir: &Path, c: &Compiled) -> Result<PathBuf, CompileError> {
    std::fs::create_dir_all(dir).map_err(|e| CompileError::Cache(e.to_string()))?;
    let path = cache_path(dir, &c.digest);
    let text = serde_json::to_string(c).map_err(|e| CompileError::Cache(e.to_string()))?;
    std::fs::write(&path, text).map_err(|e| CompileError::Cache(e.to_string()))?;
    Ok(path)
}

/// Load a cached artifact; `Ok(None)` when absent or from another version.
pub fn load(dir: &Path, digest: &str) -> Result<Option<Compiled>, CompileError> {
    let path = cache_path(dir, digest);
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CompileError::Cache(e.to_string())),
    };
    let mut c: Compiled = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(_) => return Ok(None),
    };
    if c.version != ARTIFACT_VERSION || c.digest != digest {
        return Ok(None);
    }
    c.signature.reindex();
    Ok(Some(c))
}

/// Compile, going through the cache when a directory is given. The flag
/// tells whether the artifact came from the cache.
pub fn compile_cached(
    sig: &Signature,
    p: &Property,
    opts: &CompileOptions,
    dir: Option<&Path>,
) -> Result<(Compiled, bool), CompileError> {
    if let Some(dir) = dir {
        if let Some(c) = load(dir, &digest(sig, p, opts))? {
            return Ok((c, true));
        }
    }
    let c = compile(sig, p, opts)?;
    if let Some(dir) = dir {
        save(dir, &c)?;
    }
    Ok((c, false))
}
