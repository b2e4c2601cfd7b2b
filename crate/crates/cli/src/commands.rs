//! Subcommand definitions and dispatch.
//!
//! Exit codes: 0 ok, 1 suite or check failure, 2 usage or parse error,
//! 3 node budget exhausted, 4 no period found.

use std::fs;
use std::io::{BufRead, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use strnim_core::aba::{self, AbaError, DEFAULT_MARGIN, DEFAULT_SEARCH_BOUND};
use strnim_core::families;
use strnim_core::solver::{enumerate_table, SolveError};
use strnim_core::verify::{self, Bounds, Suite};
use strnim_core::{CacheError, Position, PositionError, Solver, Symbol, TranspositionTable, DEFAULT_NODE_BUDGET};

use crate::play;
use crate::server::{self, AppState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "strnim", version, about = "Solve, analyze and play StrNim")]
pub struct Cli {
    /// Transposition cache file, loaded before and saved after the command.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Maximum expanded nodes per solve.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// P/N verdict, Grundy value, winning moves and family verdicts.
    Classify { position: String },
    /// Grundy value only.
    Grundy { position: String },
    /// Positions reachable in one move.
    Next { position: String },
    /// Legal moves with the outcome of each result.
    Moves { position: String },
    /// CSV of Grundy values for every word up to a length.
    Table {
        #[arg(long, default_value = "ab")]
        alphabet: String,
        #[arg(long)]
        max_len: usize,
        /// Output file (stdout when omitted).
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Keep one word per canonical class.
        #[arg(long)]
        canonical_only: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// The a^i b^j a^k family: Lose row, period, published tables.
    Aba {
        #[arg(short)]
        j: u32,
        #[arg(long, default_value_t = 20)]
        max_i: usize,
        #[arg(long)]
        period: bool,
        #[arg(long)]
        check_paper: bool,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND)]
        search_bound: usize,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: usize,
        /// Write the Lose row as `i,lose` CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the detected periodic set as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run a verification suite (or `all`).
    Verify {
        suite: String,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        max_i: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = Bounds::default().seed)]
        seed: u64,
        /// Also write the JSON report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Play against the engine in the terminal.
    Play {
        position: String,
        #[arg(long)]
        engine_first: bool,
        /// Write the session transcript as JSON.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Serve the HTTP API (and optionally static UI files).
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Failure = 1,
    Usage = 2,
    Budget = 3,
    NoPeriod = 4,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(#[from] PositionError),
    #[error("cache: {0}")]
    Cache(#[from] CacheError),
    #[error("{0}")]
    Solve(SolveError),
    #[error("{0}")]
    NoPeriod(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Solve(e)
    }
}

impl From<AbaError> for CliError {
    fn from(e: AbaError) -> Self {
        match e {
            AbaError::ZeroMiddle => CliError::Usage(e.to_string()),
            AbaError::NoPeriod { .. } => CliError::NoPeriod(e.to_string()),
            AbaError::Solve(s) => CliError::Solve(s),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Cache(_) => ExitCode::Usage,
            CliError::Solve(SolveError::BudgetExhausted { .. }) => ExitCode::Budget,
            CliError::NoPeriod(_) => ExitCode::NoPeriod,
            CliError::Solve(_) | CliError::Io(_) => ExitCode::Failure,
        }
    }
}

struct Ctx<'a, W: Write> {
    table: &'a Arc<TranspositionTable>,
    format: Format,
    budget: u64,
    out: &'a mut W,
}

impl<W: Write> Ctx<'_, W> {
    fn solver(&self) -> Solver<'_> {
        Solver::with_budget(self.table, self.budget)
    }

    fn json(&mut self, value: serde_json::Value) -> Result<(), CliError> {
        writeln!(self.out, "{}", serde_json::to_string_pretty(&value).expect("json"))?;
        Ok(())
    }
}

fn show(p: &Position) -> String {
    if p.is_empty() {
        "ε".into()
    } else {
        p.literal()
    }
}

/// Runs a parsed command. `input` feeds interactive play.
pub fn run<R: BufRead, W: Write, E: Write>(cli: Cli, input: R, out: &mut W, err: &mut E) -> ExitCode {
    match execute(cli, input, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute<R: BufRead, W: Write>(cli: Cli, input: R, out: &mut W) -> Result<ExitCode, CliError> {
    let table = match &cli.cache {
        Some(path) if path.exists() => TranspositionTable::load_cache(path)?,
        _ => TranspositionTable::new(),
    };
    let table = Arc::new(table);
    let mut ctx = Ctx {
        table: &table,
        format: cli.format,
        budget: cli.budget,
        out,
    };
    let code = dispatch(cli.command, input, &mut ctx)?;
    if let Some(path) = &cli.cache {
        table.save_cache(path)?;
    }
    Ok(code)
}

fn dispatch<R: BufRead, W: Write>(command: Command, input: R, ctx: &mut Ctx<'_, W>) -> Result<ExitCode, CliError> {
    match command {
        Command::Classify { position } => classify(ctx, &Position::parse(&position)?),
        Command::Grundy { position } => grundy(ctx, &Position::parse(&position)?),
        Command::Next { position } => next(ctx, &Position::parse(&position)?),
        Command::Moves { position } => moves(ctx, &Position::parse(&position)?),
        Command::Table {
            alphabet,
            max_len,
            output,
            canonical_only,
            workers,
        } => table_cmd(ctx, &alphabet, max_len, output.as_deref(), canonical_only, workers),
        Command::Aba {
            j,
            max_i,
            period,
            check_paper,
            search_bound,
            margin,
            csv,
            json,
        } => aba_cmd(ctx, j, max_i, period, check_paper, search_bound, margin, csv, json),
        Command::Verify {
            suite,
            max_len,
            max_i,
            samples,
            seed,
            report,
        } => {
            let bounds = Bounds {
                max_len,
                max_i,
                samples,
                seed,
                budget: ctx.budget,
            };
            verify_cmd(ctx, &suite, &bounds, report.as_deref())
        }
        Command::Play {
            position,
            engine_first,
            transcript,
        } => {
            let pos = Position::parse(&position)?;
            let mut solver = Solver::with_budget(ctx.table, ctx.budget);
            let t = play::play(pos, engine_first, &mut solver, input, &mut *ctx.out).map_err(|e| match e {
                play::PlayError::Io(io) => CliError::Io(io),
                play::PlayError::Solve(s) => CliError::Solve(s),
            })?;
            let body = serde_json::to_string_pretty(&t).expect("json");
            if let Some(path) = transcript {
                fs::write(path, body + "\n")?;
            } else if ctx.format == Format::Json {
                writeln!(ctx.out, "{body}")?;
            }
            Ok(ExitCode::Ok)
        }
        Command::Serve { port, host, static_dir } => {
            let state = Arc::new(AppState {
                table: Arc::clone(ctx.table),
                budget: ctx.budget,
            });
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(server::serve(SocketAddr::new(host, port), state, static_dir))?;
            Ok(ExitCode::Ok)
        }
    }
}

fn classify<W: Write>(ctx: &mut Ctx<'_, W>, pos: &Position) -> Result<ExitCode, CliError> {
    let mut solver = ctx.solver();
    let g = solver.grundy(pos)?;
    let verdict = solver.classify(pos)?;
    let winning = solver.winning_moves(pos)?;
    let fams: Vec<_> = families::all_family_verdicts(pos)
        .into_iter()
        .filter(|f| f.applicable)
        .collect();
    if ctx.format == Format::Json {
        return ctx
            .json(json!({
                "position": pos.literal(),
                "rle": pos.rle(),
                "verdict": verdict.outcome,
                "grundy": g.0,
                "certificate": verdict.certificate,
                "winning_moves": winning,
                "families": fams,
            }))
            .map(|_| ExitCode::Ok);
    }
    let out = &mut ctx.out;
    writeln!(
        out,
        "position: {} ({})",
        show(pos),
        if pos.is_empty() { "ε".into() } else { pos.rle() }
    )?;
    writeln!(out, "verdict:  {}", verdict.outcome)?;
    writeln!(out, "grundy:   {}", g)?;
    if !winning.is_empty() {
        writeln!(out, "winning moves:")?;
        for mv in &winning {
            writeln!(out, "  {} -> {}", mv, show(&pos.apply_move(*mv)?))?;
        }
    }
    for f in fams {
        let verdict = f.verdict.map(|v| v.to_string()).unwrap_or_default();
        let witness = f
            .witness
            .map(|w| serde_json::to_string(&w).expect("json"))
            .unwrap_or_default();
        writeln!(out, "family {}: {} {}", f.family, verdict, witness)?;
    }
    Ok(ExitCode::Ok)
}

fn grundy<W: Write>(ctx: &mut Ctx<'_, W>, pos: &Position) -> Result<ExitCode, CliError> {
    let g = ctx.solver().grundy(pos)?;
    match ctx.format {
        Format::Json => ctx.json(json!({"position": pos.literal(), "grundy": g.0}))?,
        Format::Text => writeln!(ctx.out, "{g}")?,
    }
    Ok(ExitCode::Ok)
}

fn next<W: Write>(ctx: &mut Ctx<'_, W>, pos: &Position) -> Result<ExitCode, CliError> {
    let rows: Vec<_> = pos
        .legal_moves()
        .into_iter()
        .map(|mv| (mv, pos.apply_move(mv).expect("legal")))
        .collect();
    match ctx.format {
        Format::Json => ctx.json(json!({
            "position": pos.literal(),
            "successors": rows.iter().map(|(mv, p)| json!({"move": mv, "position": p.literal()})).collect::<Vec<_>>(),
        }))?,
        Format::Text => {
            for (mv, p) in rows {
                writeln!(ctx.out, "{} -> {}", mv, show(&p))?;
            }
        }
    }
    Ok(ExitCode::Ok)
}

fn moves<W: Write>(ctx: &mut Ctx<'_, W>, pos: &Position) -> Result<ExitCode, CliError> {
    let mut solver = ctx.solver();
    let mut rows = Vec::new();
    for mv in pos.legal_moves() {
        let p = pos.apply_move(mv)?;
        let g = solver.grundy(&p)?;
        rows.push((mv, p, g));
    }
    match ctx.format {
        Format::Json => ctx.json(json!(rows
            .iter()
            .map(|(mv, p, g)| json!({
                "move": mv,
                "position": p.literal(),
                "result_verdict": g.outcome(),
                "result_grundy": g.0,
                "winning": g.is_zero(),
            }))
            .collect::<Vec<_>>()))?,
        Format::Text => {
            for (mv, p, g) in rows {
                let mark = if g.is_zero() { "  winning" } else { "" };
                writeln!(ctx.out, "{} -> {} [{} g={}]{}", mv, show(&p), g.outcome(), g, mark)?;
            }
        }
    }
    Ok(ExitCode::Ok)
}

fn parse_alphabet(text: &str) -> Result<Vec<Symbol>, CliError> {
    let mut letters = Vec::new();
    for ch in text.chars() {
        let s = Symbol::from_char(ch).ok_or_else(|| CliError::Usage(format!("invalid alphabet letter {ch:?}")))?;
        if letters.contains(&s) {
            return Err(CliError::Usage(format!("repeated alphabet letter {ch:?}")));
        }
        letters.push(s);
    }
    Ok(letters)
}

fn table_cmd<W: Write>(
    ctx: &mut Ctx<'_, W>,
    alphabet: &str,
    max_len: usize,
    output: Option<&Path>,
    canonical_only: bool,
    workers: usize,
) -> Result<ExitCode, CliError> {
    let letters = parse_alphabet(alphabet)?;
    let rows = enumerate_table(&letters, max_len, canonical_only, workers, ctx.table, ctx.budget)?;
    let mut csv = String::from("position,length,grundy,verdict\n");
    for (p, g) in rows {
        csv.push_str(&format!("{},{},{},{}\n", p.literal(), p.len(), g, g.outcome()));
    }
    match output {
        Some(path) => fs::write(path, csv)?,
        None => ctx.out.write_all(csv.as_bytes())?,
    }
    Ok(ExitCode::Ok)
}

#[allow(clippy::too_many_arguments)]
fn aba_cmd<W: Write>(
    ctx: &mut Ctx<'_, W>,
    j: u32,
    max_i: usize,
    period: bool,
    check_paper: bool,
    search_bound: usize,
    margin: usize,
    csv: Option<PathBuf>,
    json_path: Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    if check_paper && !(1..=6).contains(&j) {
        return Err(CliError::Usage("--check-paper needs 1 <= j <= 6".into()));
    }
    let row = aba::build_lose_table(j, max_i)?;
    if let Some(path) = &csv {
        fs::write(path, row.to_csv())?;
    }
    let wants_period = period || check_paper || json_path.is_some();
    let detected = if wants_period {
        Some(aba::detect_period(j, search_bound.max(max_i), margin)?)
    } else {
        None
    };
    if let (Some(path), Some(set)) = (&json_path, &detected) {
        fs::write(path, serde_json::to_string_pretty(&set.to_json()).expect("json") + "\n")?;
    }
    let mismatches = if check_paper {
        let known = aba::known_tables();
        let bound = max_i.max(200) as u32;
        Some(aba::membership_differences(
            detected.as_ref().expect("computed"),
            &known[&j],
            bound,
        ))
    } else {
        None
    };
    match ctx.format {
        Format::Json => ctx.json(json!({
            "j": j,
            "lose": row.values,
            "period": detected.as_ref().map(|d| d.to_json()),
            "published_mismatches": mismatches,
        }))?,
        Format::Text => {
            let values: Vec<String> = row.values.iter().map(u32::to_string).collect();
            writeln!(ctx.out, "Lose({j}) = [{}]", values.join(","))?;
            if let Some(d) = &detected {
                let fmt = |s: &std::collections::BTreeSet<(u32, u32)>| {
                    s.iter()
                        .map(|(i, k)| format!("<{i},{k}>"))
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                writeln!(ctx.out, "period:    {}", d.period)?;
                writeln!(ctx.out, "base:      {{{}}}", fmt(&d.base))?;
                writeln!(ctx.out, "repeating: {{{}}} + {}N", fmt(&d.repeating), d.period)?;
            }
            if let Some(m) = &mismatches {
                if m.is_empty() {
                    writeln!(ctx.out, "matches published L({j}) for all i, k <= {}", max_i.max(200))?;
                } else {
                    writeln!(
                        ctx.out,
                        "differs from published L({j}) on {} pairs, first {:?}",
                        m.len(),
                        m[0]
                    )?;
                }
            }
        }
    }
    Ok(match mismatches {
        Some(m) if !m.is_empty() => ExitCode::Failure,
        _ => ExitCode::Ok,
    })
}

fn verify_cmd<W: Write>(
    ctx: &mut Ctx<'_, W>,
    suite: &str,
    bounds: &Bounds,
    report: Option<&Path>,
) -> Result<ExitCode, CliError> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::from_id(suite).ok_or_else(|| {
            let ids: Vec<&str> = Suite::ALL.iter().map(|s| s.id()).collect();
            CliError::Usage(format!(
                "unknown suite {suite:?}; expected one of {} or all",
                ids.join(", ")
            ))
        })?]
    };
    let mut reports = Vec::new();
    for s in suites {
        let r = verify::run_suite(s, bounds, ctx.table)?;
        if ctx.format == Format::Text {
            writeln!(ctx.out, "{}", r.summary())?;
            for f in r.failures.iter().take(5) {
                writeln!(
                    ctx.out,
                    "  input {}: expected {}, got {}",
                    f.input, f.expected, f.actual
                )?;
            }
        }
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed());
    let body = json!({"passed": passed, "reports": reports});
    if let Some(path) = report {
        fs::write(path, serde_json::to_string_pretty(&body).expect("json") + "\n")?;
    }
    if ctx.format == Format::Json {
        ctx.json(body)?;
    }
    Ok(if passed { ExitCode::Ok } else { ExitCode::Failure })
}
