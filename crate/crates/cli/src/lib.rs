//! The `cav-sched` command line: solve, verify, generate and bench.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 search
//! stopped by a limit before optimality was proven.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::Context;
use cav_sched::bnb::SearchLimits;
use cav_sched::format::{parse_instance, parse_solution, serialize_instance, serialize_solution, Solution};
use cav_sched::gantt::render_gantt;
use cav_sched::generator::{generate_instance, GeneratorParams};
use cav_sched::model::{validate_schedule, Capacity, Instance, Objective, ProblemKind, ProcTimes, Time};
use cav_sched::solver::{solve, Algorithm, Outcome};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCOMPLETE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cav-sched",
    version,
    about = "Exact scheduling of vehicles at merges and crossroads"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and print the schedule.
    Solve(SolveArgs),
    /// Check a solution document against an instance.
    Verify(VerifyArgs),
    /// Write a seeded random instance.
    Generate(GenerateArgs),
    /// Solve every instance of a directory and tabulate the effort.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// sumc, sumwc, sumt, sumwt or cmax.
    #[arg(long, value_parser = parse_objective)]
    pub objective: Objective,
    /// auto, dp, bnb, oracle or list.
    #[arg(long, default_value = "auto", value_parser = parse_algorithm)]
    pub algorithm: Algorithm,
    #[arg(long)]
    pub gantt: bool,
    #[arg(long)]
    pub json: bool,
    /// Write the solution document here instead of printing it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub solution: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// two_chains, dedicated_parallel or crossroad.
    #[arg(long, value_parser = parse_kind)]
    pub kind: ProblemKind,
    /// Chain length per set, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub p: Time,
    /// Processing time of N2 (two-chain instances).
    #[arg(long)]
    pub p2: Option<Time>,
    #[arg(long)]
    pub r_max: Time,
    /// Draw due dates from [0, D]; without it jobs have none.
    #[arg(long)]
    pub d_max: Option<Time>,
    #[arg(long, default_value_t = 1)]
    pub w_max: Time,
    /// Four capacities, numbers or `inf` (crossroad instances).
    #[arg(long, value_delimiter = ',', value_parser = parse_capacity)]
    pub buffers: Option<Vec<Capacity>>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long, default_value = "auto", value_parser = parse_algorithm)]
    pub algorithm: Algorithm,
    /// Defaults to cmax for crossroad instances and sumc otherwise.
    #[arg(long, value_parser = parse_objective)]
    pub objective: Option<Objective>,
    #[arg(long)]
    pub json: bool,
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    s.parse().map_err(|e: cav_sched::Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: cav_sched::Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<ProblemKind, String> {
    s.parse().map_err(|e: cav_sched::Error| e.to_string())
}

fn parse_capacity(s: &str) -> Result<Capacity, String> {
    s.parse().map_err(|e: cav_sched::Error| e.to_string())
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_INPUT,
            error: error.into(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Generate(a) => cmd_generate(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {:#}", f.error);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::input)
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = read(path)?;
    parse_instance(&text)
        .with_context(|| format!("{}", path.display()))
        .map_err(Failure::input)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::input)
}

fn io(e: std::io::Error) -> Failure {
    Failure::input(e)
}

fn limits(args: &SolveArgs) -> Result<SearchLimits, Failure> {
    let time_limit = match args.time_limit {
        Some(s) if !(s.is_finite() && s >= 0.0) => {
            return Err(Failure::input(anyhow::anyhow!(
                "--time-limit must be a nonnegative number of seconds"
            )))
        }
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    Ok(SearchLimits {
        node_limit: args.node_limit,
        time_limit,
        threads: args.threads,
    })
}

fn summary(outcome: &Outcome) -> Value {
    json!({
        "algorithm": outcome.algorithm.name(),
        "objective": outcome.objective.name(),
        "value": outcome.value,
        "optimal": outcome.optimal,
        "nodes": outcome.work.nodes(),
        "time_ms": outcome.elapsed.as_secs_f64() * 1e3,
    })
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let limits = limits(args)?;
    let outcome = solve(&instance, args.objective, args.algorithm, limits).map_err(Failure::input)?;
    let complete = outcome.optimal || outcome.algorithm == Algorithm::List;
    let solution = Solution::new(&outcome.eval, args.objective, outcome.optimal).map_err(Failure::input)?;
    let document = serialize_solution(&solution);
    let gantt = args.gantt.then(|| render_gantt(&outcome.schedule, &outcome.eval));
    if let Some(path) = &args.out {
        write_file(path, &document)?;
    }

    if args.json {
        let mut value = summary(&outcome);
        value["solution"] = serde_json::from_str(&document).expect("solution documents are JSON");
        if let Some(g) = &gantt {
            value["gantt"] = Value::String(g.clone());
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("serializable")).map_err(io)?;
    } else {
        let nodes = outcome.work.nodes().map_or("-".to_string(), |n| n.to_string());
        writeln!(out, "algorithm  {}", outcome.algorithm).map_err(io)?;
        writeln!(out, "objective  {}", outcome.objective).map_err(io)?;
        writeln!(out, "value      {}", outcome.value).map_err(io)?;
        writeln!(out, "optimal    {}", outcome.optimal).map_err(io)?;
        writeln!(out, "nodes      {nodes}").map_err(io)?;
        writeln!(out, "time_ms    {:.3}", outcome.elapsed.as_secs_f64() * 1e3).map_err(io)?;
        if let Some(g) = &gantt {
            write!(out, "\n{g}").map_err(io)?;
        }
        match &args.out {
            Some(path) => writeln!(out, "\nsolution written to {}", path.display()).map_err(io)?,
            None => write!(out, "\n{document}").map_err(io)?,
        }
    }
    Ok(if complete { EXIT_OK } else { EXIT_INCOMPLETE })
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let text = read(&args.solution)?;
    let solution = parse_solution(&text)
        .with_context(|| format!("{}", args.solution.display()))
        .map_err(Failure::input)?;

    let (schedule, eval) = match solution.resolve(&instance) {
        Ok(resolved) => resolved,
        Err(e) => {
            writeln!(out, "invalid: {e}").map_err(io)?;
            return Ok(EXIT_VERIFY_FAILED);
        }
    };
    let mut failed = false;
    for violation in validate_schedule(&instance, &schedule, &eval) {
        writeln!(out, "violation: {violation}").map_err(io)?;
        failed = true;
    }
    match eval.objective_value(solution.objective) {
        Ok(v) if v == solution.value => {}
        Ok(v) => {
            writeln!(
                out,
                "value mismatch: claimed {} = {}, recomputed {v}",
                solution.objective, solution.value
            )
            .map_err(io)?;
            failed = true;
        }
        Err(e) => {
            writeln!(out, "invalid: {e}").map_err(io)?;
            failed = true;
        }
    }
    if failed {
        return Ok(EXIT_VERIFY_FAILED);
    }
    writeln!(out, "ok: {} = {}", solution.objective, solution.value).map_err(io)?;
    Ok(EXIT_OK)
}

pub fn generate_params(args: &GenerateArgs) -> anyhow::Result<GeneratorParams> {
    let kind = args.kind;
    anyhow::ensure!(
        args.sizes.len() == kind.set_count(),
        "--sizes needs {} values for {kind} instances, got {}",
        kind.set_count(),
        args.sizes.len()
    );
    anyhow::ensure!(args.p > 0, "--p must be positive");
    let proc_times = match args.p2 {
        None => ProcTimes::Equal(args.p),
        Some(p2) => {
            anyhow::ensure!(
                kind == ProblemKind::TwoChains,
                "--p2 only applies to two_chains instances"
            );
            anyhow::ensure!(p2 > 0, "--p2 must be positive");
            ProcTimes::PerLane { n1: args.p, n2: p2 }
        }
    };
    let buffers = match (&args.buffers, kind) {
        (Some(b), ProblemKind::Crossroad) => Some(
            <[Capacity; 4]>::try_from(b.as_slice())
                .map_err(|_| anyhow::anyhow!("--buffers needs 4 capacities, got {}", b.len()))?,
        ),
        (None, ProblemKind::Crossroad) => Some([Capacity::Unbounded; 4]),
        (Some(_), _) => anyhow::bail!("--buffers only applies to crossroad instances"),
        (None, _) => None,
    };
    Ok(GeneratorParams {
        kind,
        sizes: args.sizes.clone(),
        proc_times,
        r_max: args.r_max,
        d_max: args.d_max,
        w_max: args.w_max,
        buffers,
        seed: args.seed,
    })
}

pub fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> CmdResult {
    let params = generate_params(args).map_err(Failure::input)?;
    let instance = generate_instance(&params).map_err(Failure::input)?;
    write_file(&args.out, &serialize_instance(&instance))?;
    writeln!(out, "seed {}", args.seed).map_err(io)?;
    writeln!(out, "wrote {} ({} jobs)", args.out.display(), instance.n()).map_err(io)?;
    Ok(EXIT_OK)
}

/// One row of the bench table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub kind: ProblemKind,
    pub algorithm: Algorithm,
    pub objective: Objective,
    pub value: Time,
    pub optimal: bool,
    pub nodes: Option<u64>,
    /// `log2` of the node budget: `6n`, or `3n` when every buffer is zero.
    pub budget_log2: u32,
    pub within_budget: bool,
    pub time_ms: f64,
}

fn budget_log2(instance: &Instance) -> u32 {
    let n = instance.n() as u32;
    let no_wait = instance
        .buffers()
        .is_some_and(|b| b.iter().all(|c| c.finite() == Some(0)));
    if no_wait {
        3 * n
    } else {
        6 * n
    }
}

fn nodes_within(nodes: u64, log2: u32) -> bool {
    log2 >= 64 || nodes <= 1u64 << log2
}

pub fn bench_row(
    name: &str,
    instance: &Instance,
    algorithm: Algorithm,
    objective: Option<Objective>,
) -> anyhow::Result<BenchRow> {
    let objective = objective.unwrap_or(match instance.kind() {
        ProblemKind::Crossroad => Objective::Cmax,
        _ => Objective::SumC,
    });
    let outcome = solve(instance, objective, algorithm, SearchLimits::default())?;
    let nodes = outcome.work.nodes();
    let log2 = budget_log2(instance);
    Ok(BenchRow {
        instance: name.to_string(),
        kind: instance.kind(),
        algorithm: outcome.algorithm,
        objective,
        value: outcome.value,
        optimal: outcome.optimal,
        nodes,
        budget_log2: log2,
        within_budget: nodes.is_none_or(|n| nodes_within(n, log2)),
        time_ms: outcome.elapsed.as_secs_f64() * 1e3,
    })
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> CmdResult {
    let entries = fs::read_dir(&args.dir)
        .with_context(|| format!("cannot read directory {}", args.dir.display()))
        .map_err(Failure::input)?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();

    let mut rows = Vec::with_capacity(paths.len());
    for path in &paths {
        let instance = load_instance(path)?;
        let name = path
            .file_name()
            .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        let row = bench_row(&name, &instance, args.algorithm, args.objective)
            .with_context(|| name.clone())
            .map_err(Failure::input)?;
        rows.push(row);
    }

    if args.json {
        let rows: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "instance": r.instance,
                    "kind": r.kind.name(),
                    "algorithm": r.algorithm.name(),
                    "objective": r.objective.name(),
                    "value": r.value,
                    "optimal": r.optimal,
                    "nodes": r.nodes,
                    "budget_log2": r.budget_log2,
                    "within_budget": r.within_budget,
                    "time_ms": r.time_ms,
                })
            })
            .collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("serializable")).map_err(io)?;
    } else {
        writeln!(
            out,
            "{:<24} {:<18} {:<6} {:<6} {:>8} {:>7} {:>10} {:>7} {:>6} {:>10}",
            "instance", "kind", "algo", "obj", "value", "optimal", "nodes", "budget", "within", "time_ms"
        )
        .map_err(io)?;
        for r in &rows {
            let nodes = r.nodes.map_or("-".to_string(), |n| n.to_string());
            writeln!(
                out,
                "{:<24} {:<18} {:<6} {:<6} {:>8} {:>7} {:>10} {:>7} {:>6} {:>10.3}",
                r.instance,
                r.kind.name(),
                r.algorithm.name(),
                r.objective.name(),
                r.value,
                r.optimal,
                nodes,
                format!("2^{}", r.budget_log2),
                r.within_budget,
                r.time_ms
            )
            .map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}
