//! Command-line front end: stable formats, reproducible runs, honest exit codes.
//!
//! Every result document is JSON with sorted keys and embeds a [`RunManifest`] (command, flags,
//! input digest, seed, budgets, tool version), so identical invocations reproduce identical
//! bytes. Big integers in result documents are decimal strings, never floats or scientific
//! notation. Exit codes: 0 — completed operation (whatever the winner); 2 — input error;
//! 3 — a resource budget was exceeded; 4 — an internal falsification check fired.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use mwgames_core::error::CoreError;
use mwgames_core::fcb::{fcb_universe_norm, solve_fcb};
use mwgames_core::format::{
    game_from_str, game_to_dot, game_to_string, sha256_hex, RunManifest,
};
use mwgames_core::game::{validate, GameGraph, Player, VertexIdx, Weight};
use mwgames_core::geometry::{Universe, DEFAULT_GEOMETRY_BUDGET};
use mwgames_core::oracle::{cross_check, random_game, CrossCheckReport};
use mwgames_core::solver::{
    pareto_limit, solve_arbitrary_credit, solve_bounding, solve_given_credit, SolveMethod,
    SolveMode, SolveOpts, DEFAULT_SEARCH_BUDGET,
};
use mwgames_core::strategy::{bounds, parse_strategy_spec, simulate};
use mwgames_core::transforms::{capped_chain, lossy, DEFAULT_ARENA_BUDGET};

#[derive(Parser)]
#[command(
    name = "mwgames",
    version,
    about = "Solver for multi-dimensional energy and bounding games on multi-weighted game graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a game: energy with arbitrary credit (default), energy with a given credit
    /// (--credit), or the bounding game on the input as written (--bounding).
    Solve(SolveArgs),
    /// All minimal winning credits up to a norm bound.
    Pareto(ParetoArgs),
    /// Play two strategies against each other and report the run.
    Simulate(SimulateArgs),
    /// The threshold ladder of a graph: soft and slack bounds per level and the cap B.
    Bounds(BoundsArgs),
    /// Rewrite a game: the lossy extension, or the capped chain for a given credit.
    Transform(TransformArgs),
    /// List the perfect half-space universe for a norm bound and dimension.
    Enumerate(EnumerateArgs),
    /// Run every route (first-cycle, box deepening, oracle) and report agreements.
    Crosscheck(CrosscheckArgs),
    /// Render a game as Graphviz DOT.
    ExportDot(ExportDotArgs),
    /// Check a game file against the standing assumptions.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct BudgetArgs {
    /// Largest box arena (states) a single solve may build.
    #[arg(long, default_value_t = DEFAULT_ARENA_BUDGET as u64)]
    arena_budget: u64,
    /// Largest first-cycle game tree (nodes) a single solve may search.
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET as u64)]
    search_budget: u64,
    /// Largest lattice/half-space enumeration per universe construction.
    #[arg(long, default_value_t = DEFAULT_GEOMETRY_BUDGET as u64)]
    geometry_budget: u64,
}

impl BudgetArgs {
    fn to_opts(&self, mode: SolveMode, cap: Option<BigInt>, deepen: bool) -> SolveOpts {
        SolveOpts {
            mode,
            cap,
            deepen,
            arena_budget: self.arena_budget as usize,
            search_budget: self.search_budget as usize,
            geometry_budget: self.geometry_budget as usize,
        }
    }

    fn entries(&self) -> BTreeMap<String, u64> {
        BTreeMap::from([
            ("arena".into(), self.arena_budget),
            ("search".into(), self.search_budget),
            ("geometry".into(), self.geometry_budget),
        ])
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Game file (JSON).
    file: PathBuf,
    /// Solving route: fcb | box | auto.
    #[arg(long, default_value = "auto")]
    mode: String,
    /// Initial credit "b1,b2,…": solve the energy game with this given credit.
    #[arg(long)]
    credit: Option<String>,
    /// Fixed box cap (decimal integer).
    #[arg(long)]
    cap: Option<String>,
    /// Keep doubling the cap until the verdict certifies or the arena budget is hit
    /// (implied when no --cap is given).
    #[arg(long)]
    deepen: bool,
    /// Solve the bounding game on the input graph as written (no lossy reduction).
    #[arg(long, conflicts_with = "credit")]
    bounding: bool,
    /// Start vertex id (default: the file's first vertex).
    #[arg(long)]
    from: Option<String>,
    /// Write the first-cycle strategy table (state encoding → decision) to this file.
    #[arg(long)]
    dump_strategy: Option<PathBuf>,
    #[command(flatten)]
    budgets: BudgetArgs,
}

#[derive(Args)]
struct ParetoArgs {
    /// Game file (JSON).
    file: PathBuf,
    /// Search box: credits with norm up to this bound.
    #[arg(long)]
    max_norm: u64,
    /// Start vertex id (default: the file's first vertex).
    #[arg(long)]
    from: Option<String>,
    #[command(flatten)]
    budgets: BudgetArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Game file (JSON).
    file: PathBuf,
    /// Number of moves to play.
    #[arg(long)]
    steps: usize,
    /// Seed for all randomized choices.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Player-1 strategy: random | threshold:<coord> | counterless:<v>=<pos>,… |
    /// scripted:<edge>,… | automaton
    #[arg(long)]
    p1: String,
    /// Player-2 strategy: random | counterless:<v>=<pos>,… | scripted:<edge>,… | lift
    #[arg(long)]
    p2: String,
    /// Start vertex id (default: the file's first vertex).
    #[arg(long)]
    from: Option<String>,
    /// Write the visited configurations, one per line, to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    budgets: BudgetArgs,
}

#[derive(Args)]
struct BoundsArgs {
    /// Game file (JSON).
    file: PathBuf,
}

#[derive(Args)]
struct TransformArgs {
    /// Game file (JSON).
    file: PathBuf,
    /// Produce the lossy extension (unit-loss self-loops at Player-1 vertices).
    #[arg(long, conflicts_with_all = ["cap", "credit"])]
    lossy: bool,
    /// Cap for the capped chain (decimal integer, requires --credit).
    #[arg(long, requires = "credit")]
    cap: Option<String>,
    /// Credit "b1,b2,…" for the capped chain (requires --cap).
    #[arg(long, requires = "cap")]
    credit: Option<String>,
    /// Write the transformed game here instead of stdout (stdout then carries a result
    /// document; without --out, stdout carries the raw game file).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    budgets: BudgetArgs,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Norm bound on the integer generators.
    #[arg(long)]
    m: u64,
    /// Ambient dimension.
    #[arg(long)]
    dim: usize,
    /// Print raw encodings, one per line, instead of a result document.
    #[arg(long)]
    plain: bool,
    /// Largest lattice/half-space enumeration.
    #[arg(long, default_value_t = DEFAULT_GEOMETRY_BUDGET as u64)]
    geometry_budget: u64,
}

#[derive(Args)]
struct CrosscheckArgs {
    /// "random:<count>" for generated instances, or a game file path.
    #[arg(long)]
    corpus: String,
    /// Base seed for generated corpora.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Self-covering search depth.
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// Start vertex id for file corpora (default: the file's first vertex).
    #[arg(long)]
    from: Option<String>,
    #[command(flatten)]
    budgets: BudgetArgs,
}

#[derive(Args)]
struct ExportDotArgs {
    /// Game file (JSON).
    file: PathBuf,
    /// Write the DOT document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Game file (JSON).
    file: PathBuf,
    /// Include indexed vertex and edge tables (useful for writing strategy specs).
    #[arg(long)]
    tables: bool,
}

/// A failure carrying its exit code: 2 input, 3 budget, 4 falsification.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Failure {
        let code = match &e {
            CoreError::InvalidInput(_) | CoreError::InvalidGame(_) => 2,
            CoreError::Budget(_) => 3,
            CoreError::Falsification(_) => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Solve(a) => run_solve(a),
        Command::Pareto(a) => run_pareto(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Bounds(a) => run_bounds(a),
        Command::Transform(a) => run_transform(a),
        Command::Enumerate(a) => run_enumerate(a),
        Command::Crosscheck(a) => run_crosscheck(a),
        Command::ExportDot(a) => run_export_dot(a),
        Command::Validate(a) => run_validate(a),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn manifest(
    command: &str,
    input: Option<&[u8]>,
    seed: Option<u64>,
    budgets: BTreeMap<String, u64>,
) -> Value {
    // The subcommand is always argv[1]; everything after it is recorded verbatim.
    let args: Vec<String> = std::env::args().skip(2).collect();
    let m = RunManifest {
        format: 1,
        tool: "mwgames".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        args,
        input_digest: input.map(sha256_hex),
        seed,
        budgets,
    };
    serde_json::to_value(&m).expect("manifest serializes")
}

fn emit(doc: &Value) {
    println!("{}", serde_json::to_string_pretty(doc).expect("document serializes"));
}

fn read_game(path: &PathBuf) -> Result<(Vec<u8>, GameGraph), Failure> {
    let raw = std::fs::read(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&raw)
        .map_err(|_| Failure::input(format!("{} is not UTF-8", path.display())))?;
    let g = game_from_str(text)?;
    Ok((raw, g))
}

fn resolve_vertex(g: &GameGraph, from: Option<&str>) -> Result<VertexIdx, Failure> {
    match from {
        None => Ok(0),
        Some(id) => g
            .vertex_index(id)
            .ok_or_else(|| Failure::input(format!("no vertex named {id:?} in the input"))),
    }
}

fn parse_bigint(s: &str) -> Result<BigInt, Failure> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|_| Failure::input(format!("{s:?} is not a decimal integer")))
}

fn parse_weight(s: &str) -> Result<Weight, Failure> {
    let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Result<Vec<BigInt>, Failure> = trimmed.split(',').map(parse_bigint).collect();
    Ok(Weight(parts?))
}

fn player_num(p: Player) -> u64 {
    match p {
        Player::One => 1,
        Player::Two => 2,
    }
}

fn weight_json(w: &Weight) -> Value {
    Value::Array(w.0.iter().map(|x| Value::String(x.to_string())).collect())
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn run_solve(a: SolveArgs) -> Result<ExitCode, Failure> {
    let (raw, g) = read_game(&a.file)?;
    let v0 = resolve_vertex(&g, a.from.as_deref())?;
    let mode = SolveMode::parse(&a.mode)?;
    let cap = a.cap.as_deref().map(parse_bigint).transpose()?;
    let deepen = a.deepen || cap.is_none();
    let opts = a.budgets.to_opts(mode, cap, deepen);
    let credit = a.credit.as_deref().map(parse_weight).transpose()?;

    let result = match (&credit, a.bounding) {
        (Some(b), _) => solve_given_credit(&g, v0, b, &opts)?,
        (None, true) => solve_bounding(&g, v0, &opts)?,
        (None, false) => solve_arbitrary_credit(&g, v0, &opts)?,
    };

    let mut witness_ref = result.witness.clone();
    if let Some(path) = &a.dump_strategy {
        if credit.is_some() {
            return Err(Failure::input(
                "--dump-strategy describes first-cycle solves; given-credit solving goes \
                 through the box route",
            ));
        }
        let table = dump_first_cycle_table(&g, v0, a.bounding, &opts)?;
        std::fs::write(path, table)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
        witness_ref = Some(path.display().to_string());
    }

    let doc = json!({
        "format": 1,
        "manifest": manifest("solve", Some(&raw), None, a.budgets.entries()),
        "winner": player_num(result.winner),
        "certified": result.certified,
        "method": result.method.to_string(),
        "cap_used": match &result.method {
            SolveMethod::Box { cap } => Value::String(cap.to_string()),
            _ => Value::Null,
        },
        "witness_ref": witness_ref,
    });
    emit(&doc);
    Ok(ExitCode::SUCCESS)
}

/// Re-derive the first-cycle table for the graph `solve` actually searched: the input itself for
/// bounding solves, its lossy extension for energy solves.
fn dump_first_cycle_table(
    g: &GameGraph,
    v0: VertexIdx,
    bounding: bool,
    opts: &SolveOpts,
) -> Result<String, Failure> {
    let (h, hv0) = if bounding {
        (g.clone(), v0)
    } else {
        let l = lossy(g)?;
        let idx = l.vertex_index(&g.vertex(v0).id).expect("lossy keeps every vertex");
        (l, idx)
    };
    let universe = Universe::new(&fcb_universe_norm(&h), h.dimension(), opts.geometry_budget)?;
    let (winner, table) = solve_fcb(&h, hv0, universe.colours(), opts.search_budget)?;
    Ok(format!("winner: {}\n{}", player_num(winner), table.dump(&h)))
}

// ---------------------------------------------------------------------------
// pareto
// ---------------------------------------------------------------------------

fn run_pareto(a: ParetoArgs) -> Result<ExitCode, Failure> {
    let (raw, g) = read_game(&a.file)?;
    let v0 = resolve_vertex(&g, a.from.as_deref())?;
    let opts = a.budgets.to_opts(SolveMode::Auto, None, true);
    let result = pareto_limit(&g, v0, a.max_norm, &opts)?;
    let doc = json!({
        "format": 1,
        "manifest": manifest("pareto", Some(&raw), None, a.budgets.entries()),
        "max_norm": a.max_norm,
        "antichain": result.antichain.iter().map(weight_json).collect::<Vec<_>>(),
        "complete": result.complete,
        "probes": result.probes,
    });
    emit(&doc);
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn run_simulate(a: SimulateArgs) -> Result<ExitCode, Failure> {
    let (raw, g) = read_game(&a.file)?;
    let v0 = resolve_vertex(&g, a.from.as_deref())?;
    let opts = a.budgets.to_opts(SolveMode::Auto, None, true);
    let p1 =
        parse_strategy_spec(&a.p1, &g, v0, Player::One, opts.geometry_budget, opts.search_budget)?;
    let p2 =
        parse_strategy_spec(&a.p2, &g, v0, Player::Two, opts.geometry_budget, opts.search_budget)?;
    let report = simulate(&g, v0, &p1, &p2, a.steps, a.seed)?;

    if let Some(path) = &a.trace {
        let mut text = String::new();
        for c in &report.configurations {
            text.push_str(&c.display(&g));
            text.push('\n');
        }
        std::fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    }

    let doc = json!({
        "format": 1,
        "manifest": manifest("simulate", Some(&raw), Some(a.seed), a.budgets.entries()),
        "steps": a.steps,
        "start": g.vertex(v0).id,
        "configurations": report.configurations.len(),
        "final_level": weight_json(&report.final_level),
        "max_norm": report.max_norm.to_string(),
        "identity_checks": report.identity_checks,
        "shifts": report.shifts,
        "cancellations": report.cancellations,
        "bounds_certified": report.bounds_certified,
        "events": report.events.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "trace": a.trace.as_ref().map(|p| p.display().to_string()),
    });
    emit(&doc);
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

fn run_bounds(a: BoundsArgs) -> Result<ExitCode, Failure> {
    let (raw, g) = read_game(&a.file)?;
    let pack = bounds(&g)?;
    let b = pack.b().to_string();
    let levels: Vec<Value> = (1..=pack.levels())
        .map(|k| {
            json!({
                "level": k,
                "soft": pack.soft(k).to_string(),
                "slack": pack.slack(k).to_string(),
                "hard": pack.hard(k).to_string(),
                "solution_norm": pack.solution_norm(k).to_string(),
                "halfspace_count": pack.halfspace_count(k).to_string(),
            })
        })
        .collect();
    let doc = json!({
        "format": 1,
        "manifest": manifest("bounds", Some(&raw), None, BTreeMap::new()),
        "b_digits": b.len(),
        "b": b,
        "levels": levels,
        "certified": pack.certified(),
    });
    emit(&doc);
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

fn run_transform(a: TransformArgs) -> Result<ExitCode, Failure> {
    let (raw, g) = read_game(&a.file)?;
    let transformed = if a.lossy {
        lossy(&g)?
    } else if let (Some(cap), Some(credit)) = (&a.cap, &a.credit) {
        let cap = parse_bigint(cap)?;
        let credit = parse_weight(credit)?;
        capped_chain(&g, &credit, &cap, a.budgets.arena_budget as usize)?
    } else {
        return Err(Failure::input("pass --lossy, or --cap with --credit"));
    };
    let text = game_to_string(&transformed);
    match &a.out {
        None => print!("{text}"),
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
            let doc = json!({
                "format": 1,
                "manifest": manifest("transform", Some(&raw), None, a.budgets.entries()),
                "written": path.display().to_string(),
                "vertices": transformed.vertex_count(),
                "edges": transformed.edge_count(),
            });
            emit(&doc);
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------

fn run_enumerate(a: EnumerateArgs) -> Result<ExitCode, Failure> {
    let universe =
        Universe::new(&BigInt::from(a.m), a.dim, a.geometry_budget as usize)?;
    let encodings: Vec<String> =
        universe.colours().iter().map(|c| c.encoding()).collect();
    if a.plain {
        for line in &encodings {
            println!("{line}");
        }
    } else {
        let doc = json!({
            "format": 1,
            "manifest": manifest(
                "enumerate",
                None,
                None,
                BTreeMap::from([("geometry".into(), a.geometry_budget)]),
            ),
            "m": a.m,
            "dimension": a.dim,
            "count": encodings.len(),
            "colours": encodings,
        });
        emit(&doc);
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// crosscheck
// ---------------------------------------------------------------------------

fn report_row(name: &str, r: &CrossCheckReport) -> String {
    let oracle = match (r.oracle_win1, r.covered_leaves) {
        (true, Some(n)) => format!("win1({n})"),
        _ => "inconclusive".into(),
    };
    let notes = if !r.contradictions.is_empty() {
        format!("CONTRADICTION: {}", r.contradictions.join("; "))
    } else if !r.notes.is_empty() {
        r.notes.join("; ")
    } else {
        "-".into()
    };
    format!(
        "{name:<14} {:<4} {:<4} {:<10} {oracle:<13} {notes}",
        player_num(r.fcb_winner),
        player_num(r.box_winner),
        if r.box_certified { "certified" } else { "open" },
    )
}

fn run_crosscheck(a: CrosscheckArgs) -> Result<ExitCode, Failure> {
    let opts = a.budgets.to_opts(SolveMode::Auto, None, true);
    let mut rows: Vec<String> = Vec::new();
    let mut contradictions = 0usize;
    let mut input_digest: Option<Vec<u8>> = None;

    if let Some(count) = a.corpus.strip_prefix("random:") {
        let count: usize = count
            .parse()
            .map_err(|_| Failure::input("random corpus looks like random:<count>"))?;
        for i in 0..count as u64 {
            let seed = a.seed + i;
            let nv = 1 + (seed as usize % 3);
            let g = random_game(nv, 2, 1, 0.6, seed)?;
            let report = cross_check(&g, 0, a.depth, &opts)?;
            contradictions += report.contradictions.len();
            rows.push(report_row(&format!("random:{seed}"), &report));
        }
    } else {
        let path = PathBuf::from(&a.corpus);
        let (raw, g) = read_game(&path)?;
        let v0 = resolve_vertex(&g, a.from.as_deref())?;
        let report = cross_check(&g, v0, a.depth, &opts)?;
        contradictions += report.contradictions.len();
        rows.push(report_row(&a.corpus, &report));
        input_digest = Some(raw);
    }

    println!(
        "{:<14} {:<4} {:<4} {:<10} {:<13} notes",
        "instance", "fcb", "box", "box-status", "oracle"
    );
    for row in &rows {
        println!("{row}");
    }
    println!();
    println!(
        "{} instance(s), {} contradiction(s)",
        rows.len(),
        contradictions
    );
    let m = manifest(
        "crosscheck",
        input_digest.as_deref(),
        Some(a.seed),
        a.budgets.entries(),
    );
    println!("manifest: {}", serde_json::to_string(&m).expect("manifest serializes"));

    if contradictions > 0 {
        // Routes that provably agree have disagreed: surface it as a falsification.
        return Err(Failure {
            code: 4,
            message: format!("{contradictions} contradiction(s) between solving routes"),
        });
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// export-dot / validate
// ---------------------------------------------------------------------------

fn run_export_dot(a: ExportDotArgs) -> Result<ExitCode, Failure> {
    let (_, g) = read_game(&a.file)?;
    let dot = game_to_dot(&g);
    match &a.out {
        None => print!("{dot}"),
        Some(path) => std::fs::write(path, &dot)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?,
    }
    Ok(ExitCode::SUCCESS)
}

fn run_validate(a: ValidateArgs) -> Result<ExitCode, Failure> {
    let (raw, g) = read_game(&a.file)?;
    let violations = validate(&g);
    let mut doc = json!({
        "format": 1,
        "manifest": manifest("validate", Some(&raw), None, BTreeMap::new()),
        "valid": violations.is_empty(),
        "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "dimension": g.dimension(),
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
    });
    if a.tables {
        let vertices: Vec<Value> = (0..g.vertex_count())
            .map(|v| {
                json!({
                    "id": g.vertex(v).id,
                    "owner": player_num(g.vertex(v).owner),
                    "out_edges": g
                        .out_edges(v)
                        .iter()
                        .enumerate()
                        .map(|(pos, &e)| {
                            json!({
                                "position": pos,
                                "edge": e,
                                "to": g.vertex(g.edge(e).dst).id,
                                "weight": weight_json(&g.edge(e).weight),
                            })
                        })
                        .collect::<Vec<_>>(),
                })
            })
            .collect();
        doc["tables"] = json!({ "vertices": vertices });
    }
    emit(&doc);
    if violations.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}
