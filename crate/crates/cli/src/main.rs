use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use datamon::automaton::nfa_to_dot;
use datamon::coreach::{bounded_lookback_check, cg_to_dot, LookbackResult};
use datamon::logic::parse::{parse_property, parse_signature};
use datamon::logic::property::Property;
use datamon::logic::signature::Signature;
use datamon::monitor::trace_io::{parse_stream_line, parse_trace};
use datamon::monitor::{compile_cached, CompileOptions, Compiled, Session, Verdict};
use datamon::theory::{is_mc_literal, BackendKind, TheoryConfig};

mod bench;

/// Exit statuses for failures; verdicts use the statuses of [`Verdict::exit_code`].
const EXIT_USAGE: u8 = 64;
const EXIT_INPUT: u8 = 65;
const EXIT_COMPILE: u8 = 70;
const EXIT_MONITOR: u8 = 71;

#[derive(Parser)]
#[command(name = "datamon", version, about = "Anticipatory monitoring of LTLf properties over first-order data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and cache the monitoring artifacts of a property.
    Compile {
        #[command(flatten)]
        input: PropertyInput,
        #[command(flatten)]
        build: BuildArgs,
        /// Write the automaton and both coreachability graphs as DOT files here.
        #[arg(long)]
        dot_dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Report which decidability criteria a property meets.
    Analyze {
        #[command(flatten)]
        input: PropertyInput,
        /// Lookback bound to test.
        #[arg(long, default_value_t = 1)]
        lookback: usize,
        /// Longest label word searched for a lookback violation.
        #[arg(long, default_value_t = 4)]
        lookback_depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Monitor a trace file, or a stream of assignments on stdin.
    Monitor {
        #[command(flatten)]
        input: PropertyInput,
        #[command(flatten)]
        build: BuildArgs,
        /// Trace document; with --stream only its facts and leading steps are read.
        #[arg(long)]
        trace: PathBuf,
        /// Read one assignment object per line from stdin.
        #[arg(long)]
        stream: bool,
        /// Report a verdict for every prefix.
        #[arg(long)]
        per_prefix: bool,
        /// Decide constraints the facts leave open by entailment from them.
        #[arg(long)]
        entail: bool,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Time compilation and monitoring over a corpus directory.
    Bench {
        /// Directory of items, each with one `.sig`, several `.prop` and a `traces/` folder.
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
}

#[derive(Args)]
struct PropertyInput {
    #[arg(long)]
    signature: PathBuf,
    #[arg(long)]
    property: PathBuf,
}

#[derive(Args, Clone)]
struct BuildArgs {
    /// euf, mc, tame, external or external:CMD.
    #[arg(long, default_value = "tame")]
    backend: String,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Most automaton states.
    #[arg(long, default_value_t = datamon::automaton::DEFAULT_MAX_STATES)]
    budget_states: usize,
    /// Most nodes per coreachability graph.
    #[arg(long, default_value_t = datamon::coreach::DEFAULT_MAX_NODES)]
    budget_nodes: usize,
    /// Time limit per solver call in milliseconds; 0 disables it.
    #[arg(long, default_value_t = 30_000)]
    budget_solver_ms: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    JsonLines,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait WithCode<T> {
    fn code(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> WithCode<T> for Result<T, E> {
    fn code(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure { code, error: e.into() })
    }
}

impl BuildArgs {
    fn options(&self) -> anyhow::Result<CompileOptions> {
        let backend = BackendKind::parse(&self.backend)
            .ok_or_else(|| anyhow!("unknown backend `{}` (expected euf, mc, tame or external:CMD)", self.backend))?;
        if self.budget_states == 0 || self.budget_nodes == 0 {
            bail!("budgets must be positive");
        }
        let timeout = (self.budget_solver_ms > 0).then(|| Duration::from_millis(self.budget_solver_ms));
        Ok(CompileOptions {
            theory: TheoryConfig { backend, solver_timeout: timeout },
            max_states: self.budget_states,
            max_nodes: self.budget_nodes,
        })
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_property(input: &PropertyInput) -> anyhow::Result<(Signature, Property)> {
    let sig = parse_signature(&read(&input.signature)?).with_context(|| format!("in {}", input.signature.display()))?;
    let p = parse_property(&read(&input.property)?, &sig).with_context(|| format!("in {}", input.property.display()))?;
    Ok((sig, p))
}

fn compile_artifact(sig: &Signature, p: &Property, build: &BuildArgs) -> Result<(Compiled, bool), Failure> {
    let opts = build.options().code(EXIT_USAGE)?;
    compile_cached(sig, p, &opts, build.cache_dir.as_deref()).code(EXIT_COMPILE)
}

fn report_divergence(art: &Compiled) {
    if let Some(d) = art.divergence() {
        eprintln!("warning: coreachability analysis incomplete: {}", d.reason);
        if let Some(q) = d.state {
            eprintln!("  growing state: {}", art.nfa.state_label(&art.signature, q));
            for f in d.chain.iter().take(5) {
                eprintln!("    {}", f.display(&art.signature));
            }
        }
        eprintln!("  verdicts only describe the prefix seen so far");
    }
}

fn cmd_compile(input: &PropertyInput, build: &BuildArgs, dot_dir: Option<&Path>, format: Format) -> Result<u8, Failure> {
    let (sig, p) = load_property(input).code(EXIT_INPUT)?;
    let (art, cached) = compile_artifact(&sig, &p, build)?;
    if let Some(dir) = dot_dir {
        std::fs::create_dir_all(dir).code(EXIT_INPUT)?;
        let files = [
            ("nfa.dot", nfa_to_dot(&art.nfa, &sig)),
            ("cg_pos.dot", cg_to_dot(&art.cg_pos, &art.nfa, &sig)),
            ("cg_neg.dot", cg_to_dot(&art.cg_neg, &art.nfa, &sig)),
        ];
        for (name, text) in files {
            std::fs::write(dir.join(name), text).code(EXIT_INPUT)?;
        }
    }
    let s = &art.stats;
    match format {
        Format::Plain => {
            println!("digest       {}", art.digest);
            println!("backend      {}", art.backend);
            println!("|phi|        {}", p.size());
            println!("nfa          {} states, {} transitions", s.nfa_states, s.nfa_transitions);
            println!("cg+ / cg-    {} / {} nodes", s.cg_pos_nodes, s.cg_neg_nodes);
            println!("safe lookback {}", art.safe_lookback);
            println!("complete     {}", !art.degraded());
            println!("t_pre        {:.3} s{}", s.t_pre_ms / 1000.0, if cached { " (cached)" } else { "" });
        }
        Format::JsonLines => {
            let rec = json!({
                "digest": art.digest,
                "backend": art.backend,
                "size": p.size(),
                "stats": s,
                "safe_lookback": art.safe_lookback,
                "complete": !art.degraded(),
                "cached": cached,
            });
            println!("{rec}");
        }
    }
    report_divergence(&art);
    Ok(if art.degraded() { 2 } else { 0 })
}

fn cmd_analyze(input: &PropertyInput, k: usize, depth: usize, format: Format) -> Result<u8, Failure> {
    let (sig, p) = load_property(input).code(EXIT_INPUT)?;
    let acyclic = sig.is_acyclic();
    let cycle = sig.sort_cycle().map(|c| c.iter().map(|&s| sig.sort(s).name.clone()).collect::<Vec<_>>().join(" -> "));
    let tame = sig.is_tame();
    let mut non_mc = Vec::new();
    p.visit_literals(&mut |l| {
        if !is_mc_literal(l) {
            non_mc.push(l.display(&sig).to_string());
        }
    });
    let all_mc = non_mc.is_empty();
    let nfa = datamon::automaton::Nfa::build(&p, None, datamon::automaton::DEFAULT_MAX_STATES).code(EXIT_COMPILE)?;
    let safe = nfa.check_safe_lookback();
    let lookback = bounded_lookback_check(&nfa, sig.num_vars(), k, depth, 200_000);
    let lookback_text = match &lookback {
        Ok(LookbackResult::HoldsUpTo(n)) => format!("holds for words up to length {n}"),
        Ok(LookbackResult::Violated { length, transitions, .. }) => {
            format!("violated: a word of {} labels chains {length} instants", transitions.len())
        }
        Err(e) => format!("unknown ({e})"),
    };
    let unary = sig.fun_ids().all(|f| sig.function(f).args.len() <= 1);
    let arithmetic = sig.sort_ids().any(|s| sig.sort_kind(s).is_arithmetic());
    let (guaranteed, reason) = if unary && acyclic && !arithmetic {
        (true, "acyclic signature without arithmetic")
    } else if unary && acyclic && tame && all_mc {
        (true, "acyclic tame signature with monotonicity constraints only")
    } else if !unary {
        (false, "functions of several arguments")
    } else if matches!(lookback, Ok(LookbackResult::HoldsUpTo(_))) {
        (false, "bounded lookback up to the searched depth only")
    } else {
        (false, "no criterion applies")
    };
    match format {
        Format::Plain => {
            println!("acyclic          {acyclic}{}", cycle.map(|c| format!(" (cycle {c})")).unwrap_or_default());
            println!("unary functions  {unary}");
            println!("tame             {tame}");
            println!("monotonicity     {all_mc}");
            for l in &non_mc {
                println!("  not MC: {l}");
            }
            println!("safe lookback    {safe}");
            println!("{k}-bounded lookback {lookback_text}");
            println!("termination      {} ({reason})", if guaranteed { "guaranteed" } else { "best-effort" });
        }
        Format::JsonLines => {
            let rec = json!({
                "acyclic": acyclic,
                "unary": unary,
                "tame": tame,
                "mc": all_mc,
                "non_mc": non_mc,
                "safe_lookback": safe,
                "lookback_bound": k,
                "lookback": lookback_text,
                "termination": if guaranteed { "guaranteed" } else { "best-effort" },
                "reason": reason,
            });
            println!("{rec}");
        }
    }
    Ok(0)
}

struct Printer {
    format: Format,
    per_prefix: bool,
}

impl Printer {
    fn emit(&self, instant: usize, v: &Verdict) {
        match self.format {
            Format::Plain if self.per_prefix => println!("{instant} {v}"),
            Format::Plain => println!("{v}"),
            Format::JsonLines => println!("{}", json!({ "instant": instant, "verdict": v })),
        }
        let _ = std::io::stdout().flush();
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_monitor(
    input: &PropertyInput,
    build: &BuildArgs,
    trace: &Path,
    stream: bool,
    per_prefix: bool,
    entail: bool,
    format: Format,
) -> Result<u8, Failure> {
    let (sig, p) = load_property(input).code(EXIT_INPUT)?;
    let text = read(trace).code(EXIT_INPUT)?;
    let tr = parse_trace(&sig, &text).with_context(|| format!("in {}", trace.display())).code(EXIT_INPUT)?;
    if !stream && tr.is_empty() {
        return Err(Failure { code: EXIT_INPUT, error: anyhow!("the trace is empty") });
    }
    let (art, _) = compile_artifact(&sig, &p, build)?;
    report_divergence(&art);
    let opts = build.options().code(EXIT_USAGE)?;
    let mut session = Session::new(&art, tr.facts.clone()).code(EXIT_MONITOR)?;
    if entail {
        let th = opts.theory.instantiate(&sig).code(EXIT_COMPILE)?;
        session = session.with_entailment(th);
    }
    let out = Printer { format, per_prefix: per_prefix || stream };
    let mut last = None;
    let step = |session: &mut Session, a, last: &mut Option<Verdict>| -> Result<(), Failure> {
        let i = session.instant();
        let v = session.step(a).code(EXIT_MONITOR)?;
        if out.per_prefix {
            out.emit(i, &v);
        }
        *last = Some(v);
        Ok(())
    };
    for a in tr.assignments {
        step(&mut session, a, &mut last)?;
    }
    if stream {
        for (n, line) in std::io::stdin().lock().lines().enumerate() {
            let line = line.code(EXIT_INPUT)?;
            if line.trim().is_empty() {
                continue;
            }
            if serde_json::from_str::<serde_json::Value>(&line).ok().is_some_and(|j| j.get("facts").is_some()) {
                return Err(Failure {
                    code: EXIT_INPUT,
                    error: anyhow!("line {}: facts are fixed when the session starts", n + 1),
                });
            }
            let a = parse_stream_line(&sig, n + 1, &line).code(EXIT_INPUT)?;
            step(&mut session, a, &mut last)?;
        }
    }
    let Some(v) = last else {
        return Err(Failure { code: EXIT_INPUT, error: anyhow!("the trace is empty") });
    };
    if !out.per_prefix {
        out.emit(session.instant() - 1, &v);
    }
    Ok(v.exit_code() as u8)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Compile { input, build, dot_dir, format } => cmd_compile(input, build, dot_dir.as_deref(), *format),
        Command::Analyze { input, lookback, lookback_depth, format } => {
            cmd_analyze(input, *lookback, *lookback_depth, *format)
        }
        Command::Monitor { input, build, trace, stream, per_prefix, entail, format } => {
            cmd_monitor(input, build, trace, *stream, *per_prefix, *entail, *format)
        }
        Command::Bench { corpus, build, format } => {
            let opts = build.options().code(EXIT_USAGE)?;
            bench::run(corpus, &opts, build.cache_dir.as_deref(), *format).code(EXIT_INPUT)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
