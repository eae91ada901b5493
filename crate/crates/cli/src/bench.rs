//! Timing runs over a corpus directory.
//!
//! Every subdirectory of the corpus is an item holding one signature file
//! (`*.sig`), any number of properties (`*.prop`) and trace documents in
//! `traces/*.json`. Each property is compiled once and monitored on every
//! trace of its item.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use serde::Serialize;

use datamon::logic::parse::{parse_property, parse_signature};
use datamon::monitor::trace_io::parse_trace;
use datamon::monitor::{compile_cached, monitor, CompileOptions};

use crate::Format;

#[derive(Debug, Serialize)]
pub struct Row {
    pub item: String,
    pub property: String,
    pub size: usize,
    /// Seconds for the whole row, parsing included.
    pub t: f64,
    pub t_pre: f64,
    pub t_mon: f64,
    pub verdicts: Vec<String>,
    pub error: Option<String>,
}

fn files_with(dir: &Path, ext: &str) -> anyhow::Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == ext))
        .collect();
    out.sort();
    Ok(out)
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn bench_property(
    sig_text: &str,
    prop: &Path,
    traces: &[PathBuf],
    opts: &CompileOptions,
    cache: Option<&Path>,
    row: &mut Row,
) -> anyhow::Result<()> {
    let sig = parse_signature(sig_text)?;
    let p = parse_property(&std::fs::read_to_string(prop)?, &sig)?;
    row.size = p.size();
    let start = Instant::now();
    let (art, _) = compile_cached(&sig, &p, opts, cache)?;
    row.t_pre = start.elapsed().as_secs_f64();
    for tr in traces {
        let tr = parse_trace(&sig, &std::fs::read_to_string(tr)?).with_context(|| format!("in {}", tr.display()))?;
        let start = Instant::now();
        let v = monitor(&art, &tr)?;
        row.t_mon += start.elapsed().as_secs_f64();
        row.verdicts.push(v.code().to_string());
    }
    Ok(())
}

/// Benchmark every item of the corpus.
pub fn collect(corpus: &Path, opts: &CompileOptions, cache: Option<&Path>) -> anyhow::Result<Vec<Row>> {
    if !corpus.is_dir() {
        bail!("{} is not a directory", corpus.display());
    }
    let mut items: Vec<PathBuf> = std::fs::read_dir(corpus)?.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_dir()).collect();
    items.sort();
    let mut rows = Vec::new();
    for item in items {
        let sigs = files_with(&item, "sig")?;
        let props = files_with(&item, "prop")?;
        let traces = files_with(&item.join("traces"), "json")?;
        let sig_text = match sigs.as_slice() {
            [one] => Some(std::fs::read_to_string(one)?),
            _ => None,
        };
        for prop in props {
            let mut row = Row {
                item: stem(&item),
                property: stem(&prop),
                size: 0,
                t: 0.0,
                t_pre: 0.0,
                t_mon: 0.0,
                verdicts: Vec::new(),
                error: None,
            };
            let start = Instant::now();
            let res = match &sig_text {
                Some(text) => bench_property(text, &prop, &traces, opts, cache, &mut row),
                None => Err(anyhow::anyhow!("expected exactly one .sig file, found {}", sigs.len())),
            };
            row.t = start.elapsed().as_secs_f64();
            row.error = res.err().map(|e| format!("{e:#}"));
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Print the table; the status is 2 when some row failed.
pub fn run(corpus: &Path, opts: &CompileOptions, cache: Option<&Path>, format: Format) -> anyhow::Result<u8> {
    let rows = collect(corpus, opts, cache)?;
    match format {
        Format::Plain => {
            println!("{:<10} {:<18} {:>5} {:>8} {:>8} {:>8}  verdicts", "item", "property", "|phi|", "t", "t_pre", "t_mon");
            for r in &rows {
                let tail = match &r.error {
                    Some(e) => format!("error: {e}"),
                    None => r.verdicts.join(" "),
                };
                println!(
                    "{:<10} {:<18} {:>5} {:>8.3} {:>8.3} {:>8.3}  {tail}",
                    r.item, r.property, r.size, r.t, r.t_pre, r.t_mon
                );
            }
        }
        Format::JsonLines => {
            for r in &rows {
                println!("{}", serde_json::to_string(r)?);
            }
        }
    }
    Ok(if rows.iter().any(|r| r.error.is_some()) { 2 } else { 0 })
}
