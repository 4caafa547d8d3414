use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use pegball_core::basis::{basis_search_length, peg_basis_up_to};
use pegball_core::verify;
use pegball_core::{
    generating_set, grid_member, membership, peg_of, sequence, standard_basis, DistanceTable,
    Error, Limits, Membership, Method, Model, Oracle, PegPermutation, Permutation, Suite,
    TableKind, VerifyOptions,
};
use serde_json::{json, Value};

/// Reversal and prefix reversal balls, their peg permutations, generators and bases.
#[derive(Parser, Debug)]
#[command(name = "pegball", version)]
struct Cli {
    /// Distance model: rd (reversals) or prd (prefix reversals).
    #[arg(long, global = true, default_value = "rd")]
    model: Model,
    /// Print one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for persisted distance tables.
    #[arg(long, global = true, env = "PEGBALL_CACHE")]
    cache_dir: Option<PathBuf>,
    /// Longest standard permutation served from a table (hard ceiling 11).
    #[arg(long, global = true)]
    limit: Option<usize>,
    /// Longest peg permutation served from a table (hard ceiling 8).
    #[arg(long, global = true)]
    peg_limit: Option<usize>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact distance of a permutation from the identity.
    Distance { perm: String },
    /// Exact distance of a peg permutation, e.g. "2+ 1+".
    PegDistance { peg: String },
    /// The clean compact peg permutation of a permutation.
    Peg { perm: String },
    /// The k-generating set.
    Generate {
        #[arg(long)]
        k: usize,
    },
    /// Clean compact peg basis of the peg ball.
    PegBasis {
        #[arg(long)]
        k: usize,
        /// Longest candidate examined; defaults to the search length for (model, k).
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Standard basis from M-sets, verified against the ball.
    Basis {
        #[arg(long)]
        k: usize,
        /// Length cap for every M-set search.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Ball sizes for lengths 1..=n-max.
    Enumerate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value = "bfs")]
        method: Method,
    },
    /// Ball membership with a witnessing generator or basis element.
    Member {
        #[arg(long)]
        k: usize,
        perm: String,
    },
    /// Grid class membership.
    GridMember { peg: String, perm: String },
    /// Reproduction checks and property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        /// Perturb a published constant; the run must then fail.
        #[arg(long, hide = true)]
        mutate: Option<String>,
    },
    /// Manage persisted distance tables.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug)]
enum CacheAction {
    /// Build and store the table for --model, --n and --kind.
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "standard")]
        kind: TableKind,
    },
    /// List stored tables.
    List,
    /// Delete stored tables.
    Clear,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 2,
            Error::LimitExceeded { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

struct Output {
    command: &'static str,
    model: Option<Model>,
    k: Option<usize>,
    result: Value,
    text: String,
    code: u8,
}

impl Output {
    fn new(
        command: &'static str,
        model: Option<Model>,
        k: Option<usize>,
        result: Value,
        text: String,
    ) -> Self {
        Output {
            command,
            model,
            k,
            result,
            text,
            code: 0,
        }
    }
}

fn parse_perm(s: &str) -> Result<Permutation, Failure> {
    if s.trim().is_empty() {
        return Err(usage("empty permutation"));
    }
    Ok(s.parse()?)
}

fn parse_peg(s: &str) -> Result<PegPermutation, Failure> {
    if s.trim().is_empty() {
        return Err(usage("empty peg permutation"));
    }
    Ok(s.parse()?)
}

fn lines<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Value {
    Value::from(items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

fn run(cli: &Cli, oracle: &Oracle) -> Result<Output, Failure> {
    let model = cli.model;
    Ok(match &cli.command {
        Command::Distance { perm } => {
            let d = oracle.distance(model, &parse_perm(perm)?)?;
            Output::new("distance", Some(model), None, json!(d), d.to_string())
        }
        Command::PegDistance { peg } => {
            let d = oracle.distance_peg(model, &parse_peg(peg)?)?;
            Output::new("peg-distance", Some(model), None, json!(d), d.to_string())
        }
        Command::Peg { perm } => {
            let pp = peg_of(&parse_perm(perm)?)?;
            Output::new("peg", None, None, json!(pp.to_string()), pp.to_string())
        }
        Command::Generate { k } => {
            let set = generating_set(model, *k);
            let text = format!("{}\ncount={}", lines(&set.members), set.len());
            let result = json!({ "generators": strings(&set.members), "count": set.len() });
            Output::new("generate", Some(model), Some(*k), result, text)
        }
        Command::PegBasis { k, max_len } => {
            let len = max_len.unwrap_or_else(|| basis_search_length(model, *k));
            let b = peg_basis_up_to(oracle, model, *k, len)?;
            let text = format!(
                "{}\ncount={}\nsearch_length={len}",
                lines(&b.members),
                b.members.len()
            );
            let result = json!({
                "members": strings(&b.members),
                "count": b.members.len(),
                "search_length": len,
            });
            Output::new("peg-basis", Some(model), Some(*k), result, text)
        }
        Command::Basis { k, cap } => basis(oracle, model, *k, *cap)?,
        Command::Enumerate { k, n_max, method } => {
            let counts = sequence(oracle, model, *k, *n_max, *method)?;
            let text = lines(
                counts
                    .iter()
                    .enumerate()
                    .map(|(i, c)| format!("{}\t{c}", i + 1)),
            );
            let result = json!({ "method": method, "counts": counts });
            Output::new("enumerate", Some(model), Some(*k), result, text)
        }
        Command::Member { k, perm } => {
            let m = membership(oracle, model, *k, &parse_perm(perm)?)?;
            let text = match &m {
                Membership::Inside {
                    distance,
                    generator,
                } => {
                    format!("inside distance={distance} generator={generator}")
                }
                Membership::Outside {
                    distance,
                    basis_element,
                } => format!("outside distance={distance} basis_element={basis_element}"),
            };
            let result = serde_json::to_value(&m).expect("serializable");
            Output::new("member", Some(model), Some(*k), result, text)
        }
        Command::GridMember { peg, perm } => {
            let yes = grid_member(&parse_peg(peg)?, &parse_perm(perm)?);
            Output::new("grid-member", None, None, json!(yes), yes.to_string())
        }
        Command::Verify { suite, mutate } => {
            let mut opts = VerifyOptions {
                suite: *suite,
                seed: cli.seed,
                ..Default::default()
            };
            if let Some(name) = mutate {
                opts.mutate(name).map_err(|e| usage(e.to_string()))?;
            }
            let checks = verify::run(oracle, &opts);
            let failed = checks.iter().any(|c| c.status.is_failure());
            let text = lines(checks.iter().map(|c| {
                let mut line = format!(
                    "{:<26} {:<25} {:>7} ms  {}",
                    c.id,
                    c.status.to_string(),
                    c.elapsed_ms,
                    c.title
                );
                if !c.detail.is_empty() {
                    line.push_str(&format!("\n{:<26} {}", "", c.detail));
                }
                line
            }));
            let result = serde_json::to_value(&checks).expect("serializable");
            let mut out = Output::new("verify", None, None, result, text);
            out.code = if failed { 4 } else { 0 };
            out
        }
        Command::Cache { action } => cache(cli, oracle, action)?,
    })
}

fn basis(oracle: &Oracle, model: Model, k: usize, cap: Option<usize>) -> Result<Output, Failure> {
    let b = standard_basis(oracle, model, k, cap)?;
    let mut text: Vec<String> = b
        .members
        .iter()
        .map(|m| format!("{m}\tfrom {}", lines(&b.provenance[m]).replace('\n', ", ")))
        .collect();
    text.push(format!("count={}", b.members.len()));
    text.push(format!(
        "verified_up_to={} verified={}",
        b.verified_up_to,
        b.verified()
    ));
    if let Some(c) = &b.counterexample {
        text.push(format!("counterexample={c}"));
    }
    if !b.missing.is_empty() {
        text.push(format!("missing={}", lines(&b.missing).replace('\n', ", ")));
    }
    if !b.spurious.is_empty() {
        text.push(format!(
            "spurious={}",
            lines(&b.spurious).replace('\n', ", ")
        ));
    }
    for m in &b.m_sets {
        if m.cap_hit_without_witness() {
            text.push(format!(
                "warning: no M-set witness for {} up to length {}",
                m.beta, m.cap
            ));
        }
    }
    let clamped = b.m_sets.iter().filter(|m| m.clamped).count();
    if clamped > 0 {
        text.push(format!(
            "note: {clamped} of {} M-set searches stopped at the table limit",
            b.m_sets.len()
        ));
    }
    let result = json!({
        "members": b.members.iter().map(|m| json!({
            "perm": m.to_string(),
            "from": strings(&b.provenance[m]),
        })).collect::<Vec<_>>(),
        "count": b.members.len(),
        "verified_up_to": b.verified_up_to,
        "verified": b.verified(),
        "counterexample": b.counterexample.as_ref().map(|c| c.to_string()),
        "missing": strings(&b.missing),
        "spurious": strings(&b.spurious),
        "m_sets": b.m_sets.iter().map(|m| json!({
            "beta": m.beta.to_string(),
            "target_distance": m.target_distance,
            "cap": m.cap,
            "clamped": m.clamped,
            "examined": m.examined,
            "members": strings(&m.members),
        })).collect::<Vec<_>>(),
    });
    Ok(Output::new(
        "basis",
        Some(model),
        Some(k),
        result,
        text.join("\n"),
    ))
}

fn stored_tables(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let mut found = Vec::new();
    if !dir.exists() {
        return Ok(found);
    }
    let entries = std::fs::read_dir(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    for entry in entries.flatten() {
        let path = entry.path();
        if path.extension().is_some_and(|x| x == "dist") {
            found.push(path);
        }
    }
    found.sort();
    Ok(found)
}

fn cache(cli: &Cli, oracle: &Oracle, action: &CacheAction) -> Result<Output, Failure> {
    let dir = cli
        .cache_dir
        .as_deref()
        .ok_or_else(|| usage("cache commands need --cache-dir or PEGBALL_CACHE"))?;
    Ok(match action {
        CacheAction::Build { n, kind } => {
            let t = oracle.build_table(cli.model, *n, *kind)?;
            let path = dir.join(DistanceTable::file_name(cli.model, *kind, *n));
            if !path.exists() {
                t.save(dir)?;
            }
            let text = format!(
                "{} states={} max_distance={}",
                path.display(),
                t.len(),
                t.max_distance()
            );
            let result = json!({
                "path": path.display().to_string(),
                "states": t.len(),
                "max_distance": t.max_distance(),
                "histogram": t.histogram(),
            });
            Output::new("cache", Some(cli.model), None, result, text)
        }
        CacheAction::List => {
            let mut rows = Vec::new();
            for path in stored_tables(dir)? {
                let t = DistanceTable::load(&path)?;
                rows.push(json!({
                    "file": path.file_name().map(|f| f.to_string_lossy().into_owned()),
                    "model": t.model(),
                    "kind": t.kind(),
                    "n": t.n(),
                    "states": t.len(),
                }));
            }
            let text = lines(rows.iter().map(|r| {
                format!(
                    "{}\tstates={}",
                    r["file"].as_str().unwrap_or(""),
                    r["states"]
                )
            }));
            Output::new("cache", None, None, Value::from(rows), text)
        }
        CacheAction::Clear => {
            let files = stored_tables(dir)?;
            for f in &files {
                std::fs::remove_file(f).map_err(|e| usage(format!("{}: {e}", f.display())))?;
            }
            let text = format!("removed {}", files.len());
            Output::new("cache", None, None, json!({ "removed": files.len() }), text)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let defaults = Limits::default();
    let limits = Limits {
        standard: cli.limit.unwrap_or(defaults.standard),
        peg: cli.peg_limit.unwrap_or(defaults.peg),
        ..defaults
    };
    let oracle = match Oracle::with_limits(limits) {
        Ok(o) => o,
        Err(e) => {
            let f = Failure::from(e);
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let oracle = match &cli.cache_dir {
        Some(dir) => {
            if let Err(e) = std::fs::create_dir_all(dir) {
                eprintln!("error: {}: {e}", dir.display());
                return ExitCode::from(1);
            }
            oracle.with_cache_dir(dir)
        }
        None => oracle,
    };
    let start = Instant::now();
    match run(&cli, &oracle) {
        Ok(out) => {
            if cli.json {
                let doc = json!({
                    "command": out.command,
                    "model": out.model,
                    "k": out.k,
                    "result": out.result,
                    "elapsed_ms": start.elapsed().as_millis() as u64,
                    "limits": limits,
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("serializable")
                );
            } else if !out.text.is_empty() {
                println!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
