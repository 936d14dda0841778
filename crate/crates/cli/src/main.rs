//! `hangar`: generate, solve, export, import, validate, render and compare
//! hangar plans.
//!
//! Exit codes: 0 ok, 2 infeasible plan, 3 parse error, 4 oracle budget
//! exhausted, 1 anything else. Failures end with one JSON line on stderr.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use hangar_core::exact::{solve_exact, OracleConfig, OracleStatus, TimeCandidates};
use hangar_core::instgen::{generate, GeneratorConfig};
use hangar_core::io::{load_instance, load_solution, save_instance, save_solution};
use hangar_core::milp::{build_model, export_lp, import_solution, parse_lp};
use hangar_core::report::{render_frames, render_report};
use hangar_core::{ach, evaluate_cost, explain, validate, Error, HangarConfig, Instance};

#[derive(Parser)]
#[command(name = "hangar", version, about = "Hangar scheduling and layout toolkit")]
struct Cli {
    /// TOML file with [hangar], [generator] and [oracle] tables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Solve with the constructive heuristic.
    SolveAch(SolveArgs),
    /// Solve with the exact oracle (small instances only).
    SolveExact(ExactArgs),
    /// Write the MILP in LP format.
    ExportMilp(ExportArgs),
    /// Read a solver's variable listing back into a plan.
    Import(ImportArgs),
    /// Check a plan and print its violations.
    Validate(ValidateArgs),
    /// Draw layout frames and optionally an HTML report.
    Render(RenderArgs),
    /// Heuristic against oracle on a batch of instances, as CSV.
    Compare(CompareArgs),
}

#[derive(Args, Default)]
struct HangarFlags {
    #[arg(long)]
    hw: Option<f64>,
    #[arg(long)]
    hl: Option<f64>,
    #[arg(long)]
    buffer: Option<f64>,
    #[arg(long)]
    eps_t: Option<f64>,
    #[arg(long)]
    eps_p: Option<f64>,
    #[arg(long)]
    grid_step: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(short, long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Compress arrival gaps by this factor (0.2 when given without a value).
    #[arg(long, num_args = 0..=1, default_missing_value = "0.2")]
    congestion: Option<f64>,
    /// Multiply rejection penalties by the configured factor.
    #[arg(long)]
    high_rejection: bool,
    /// Number of aircraft already parked.
    #[arg(long)]
    current: Option<usize>,
    #[command(flatten)]
    hangar: HangarFlags,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args, Default)]
struct OracleFlags {
    #[arg(long)]
    node_budget: Option<u64>,
    /// Seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Roll-ins on a uniform grid of this many hours instead of event times.
    #[arg(long)]
    time_grid: Option<f64>,
    #[arg(long)]
    max_future: Option<usize>,
    #[arg(long)]
    grid_step: Option<f64>,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
    #[command(flatten)]
    oracle: OracleFlags,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct ImportArgs {
    #[arg(short, long)]
    instance: PathBuf,
    /// The LP file the listing was produced from.
    #[arg(short, long)]
    model: PathBuf,
    /// Variable listing written by the solver.
    #[arg(short, long)]
    point: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(short, long)]
    solution: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(short, long)]
    solution: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
    /// Also write report.html into the output directory.
    #[arg(long)]
    html: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Instance files.
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    /// CSV destination; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Print rows as JSON on stdout as well.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    oracle: OracleFlags,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    hangar: HangarSection,
    generator: Option<toml::Table>,
    oracle: OracleSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct HangarSection {
    hw: Option<f64>,
    hl: Option<f64>,
    buffer: Option<f64>,
    eps_t: Option<f64>,
    eps_p: Option<f64>,
    grid_step: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct OracleSection {
    node_budget: Option<u64>,
    time_budget: Option<f64>,
    time_grid: Option<f64>,
    max_future: Option<usize>,
    grid_step: Option<f64>,
}

/// Outcome that maps to a nonzero exit without being an error.
struct Status {
    code: u8,
}

fn load_config(path: Option<&Path>) -> anyhow::Result<FileConfig> {
    let Some(path) = path else { return Ok(FileConfig::default()) };
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    toml::from_str(&text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|s| {
                let before = &text[..s.start];
                (before.lines().count().max(1), before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1)
            })
            .unwrap_or((1, 1));
        Error::Parse { path: path.to_path_buf(), line, column, message: e.message().to_string() }.into()
    })
}

fn hangar_from(flags: &HangarFlags, file: &HangarSection) -> HangarConfig {
    let d = HangarConfig::default();
    HangarConfig {
        hw: flags.hw.or(file.hw).unwrap_or(d.hw),
        hl: flags.hl.or(file.hl).unwrap_or(d.hl),
        buffer: flags.buffer.or(file.buffer).unwrap_or(d.buffer),
        eps_t: flags.eps_t.or(file.eps_t).unwrap_or(d.eps_t),
        eps_p: flags.eps_p.or(file.eps_p).unwrap_or(d.eps_p),
        grid_step: flags.grid_step.or(file.grid_step).unwrap_or(d.grid_step),
    }
}

fn oracle_from(flags: &OracleFlags, file: &OracleSection, instance: &Instance) -> OracleConfig {
    let d = OracleConfig::for_hangar(&instance.hangar);
    OracleConfig {
        grid_step: flags.grid_step.or(file.grid_step).unwrap_or(d.grid_step),
        time_candidates: match flags.time_grid.or(file.time_grid) {
            Some(step) => TimeCandidates::Grid { step },
            None => TimeCandidates::EventDriven,
        },
        node_budget: flags.node_budget.or(file.node_budget).unwrap_or(d.node_budget),
        time_budget: flags.time_budget.or(file.time_budget).unwrap_or(d.time_budget),
        max_future: flags.max_future.or(file.max_future).unwrap_or(d.max_future),
    }
}

fn generator_from(args: &GenArgs, file: Option<&toml::Table>, config_path: Option<&Path>) -> anyhow::Result<GeneratorConfig> {
    let mut g: GeneratorConfig = match file {
        Some(t) => t.clone().try_into().map_err(|e: toml::de::Error| Error::Parse {
            path: config_path.map(Path::to_path_buf).unwrap_or_default(),
            line: 1,
            column: 1,
            message: format!("[generator]: {}", e.message()),
        })?,
        None => GeneratorConfig::default(),
    };
    if let Some(n) = args.n {
        g.n = n;
    }
    if let Some(seed) = args.seed {
        g.seed = seed;
    }
    if args.congestion.is_some() {
        g.congestion = args.congestion;
    }
    if args.high_rejection {
        g.high_rejection = true;
    }
    if let Some(c) = args.current {
        g.n_current = c;
    }
    Ok(g)
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(())
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    Ok(fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?)
}

#[derive(Debug, Serialize)]
struct CompareRow {
    instance: String,
    label: String,
    n_future: Option<usize>,
    ach_cost: Option<f64>,
    ach_time_s: Option<f64>,
    oracle_cost: Option<f64>,
    oracle_status: Option<String>,
    oracle_time_s: Option<f64>,
    gap_pct: Option<f64>,
    error: Option<String>,
}

fn compare_one(path: &Path, flags: &OracleFlags, file: &OracleSection) -> CompareRow {
    let mut row = CompareRow {
        instance: path.display().to_string(),
        label: String::new(),
        n_future: None,
        ach_cost: None,
        ach_time_s: None,
        oracle_cost: None,
        oracle_status: None,
        oracle_time_s: None,
        gap_pct: None,
        error: None,
    };
    let run = |row: &mut CompareRow| -> anyhow::Result<()> {
        let instance = load_instance(path)?;
        row.label = instance.label.clone();
        row.n_future = Some(instance.future.len());
        let t = Instant::now();
        let heuristic = ach::solve(&instance);
        row.ach_time_s = Some(t.elapsed().as_secs_f64());
        let ach_cost = evaluate_cost(&instance, &heuristic)?.total;
        row.ach_cost = Some(ach_cost);
        let t = Instant::now();
        let r = solve_exact(&instance, &oracle_from(flags, file, &instance))?;
        row.oracle_time_s = Some(t.elapsed().as_secs_f64());
        row.oracle_cost = Some(r.cost.total);
        row.oracle_status = Some(format!("{:?}", r.status));
        if r.status == OracleStatus::ProvenOptimalOnGrid && r.cost.total > 0.0 {
            row.gap_pct = Some((ach_cost - r.cost.total) / r.cost.total * 100.0);
        }
        Ok(())
    };
    if let Err(e) = run(&mut row) {
        row.error = Some(format!("{e:#}"));
    }
    row
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let file = load_config(cli.config.as_deref())?;
    let ok = Status { code: 0 };
    match cli.cmd {
        Cmd::Gen(args) => {
            let hangar = hangar_from(&args.hangar, &file.hangar);
            let g = generator_from(&args, file.generator.as_ref(), cli.config.as_deref())?;
            let instance = generate(&g, &hangar)?;
            save_instance(&instance, &args.out)?;
            println!("{}: {} future, {} current -> {}", instance.label, instance.future.len(), instance.current.len(), args.out.display());
        }
        Cmd::SolveAch(args) => {
            let instance = load_instance(&args.instance)?;
            let solution = ach::solve(&instance);
            let cost = evaluate_cost(&instance, &solution)?;
            save_solution(&solution, &args.out)?;
            let accepted = solution.assignments.iter().filter(|a| a.accept).count();
            println!("{}: cost {:.4}, {accepted} of {} accepted", instance.label, cost.total, instance.len());
        }
        Cmd::SolveExact(args) => {
            let instance = load_instance(&args.instance)?;
            let config = oracle_from(&args.oracle, &file.oracle, &instance);
            let r = solve_exact(&instance, &config)?;
            save_solution(&r.solution, &args.out)?;
            println!("{}: cost {:.4}, {:?}, {} nodes", instance.label, r.cost.total, r.status, r.nodes_explored);
            if r.status == OracleStatus::BudgetExhausted {
                return Ok(Status { code: 4 });
            }
        }
        Cmd::ExportMilp(args) => {
            let instance = load_instance(&args.instance)?;
            let model = build_model(&instance);
            write_text(&args.out, &export_lp(&model))?;
            println!("{}: {} variables, {} rows -> {}", instance.label, model.variables.len(), model.rows.len(), args.out.display());
        }
        Cmd::Import(args) => {
            let instance = load_instance(&args.instance)?;
            let model = build_model(&instance);
            let lp = parse_lp(&read_text(&args.model)?, &args.model)?;
            let expected: BTreeSet<String> = model.variables.iter().map(|v| v.name.clone()).collect();
            let found: BTreeSet<String> = lp.variable_names().into_iter().collect();
            if expected != found {
                let missing = expected.difference(&found).next();
                let extra = found.difference(&expected).next();
                return Err(Error::Parse {
                    path: args.model.clone(),
                    line: 1,
                    column: 1,
                    message: format!(
                        "model does not belong to this instance (first missing variable: {}, first unknown: {})",
                        missing.map_or("none", String::as_str),
                        extra.map_or("none", String::as_str)
                    ),
                }
                .into());
            }
            let solution = import_solution(&model, &instance, &read_text(&args.point)?, &args.point)?;
            let cost = evaluate_cost(&instance, &solution)?;
            save_solution(&solution, &args.out)?;
            println!("{}: imported, cost {:.4}", instance.label, cost.total);
        }
        Cmd::Validate(args) => {
            let instance = load_instance(&args.instance)?;
            let solution = load_solution(&args.solution)?;
            let report = validate(&instance, &solution)?;
            if args.json {
                println!("{}", serde_json::to_string(&report)?);
            } else {
                println!("{}", explain(&report));
                println!("cost {:.4}", report.cost.total);
            }
            if !report.feasible {
                return Ok(Status { code: 2 });
            }
        }
        Cmd::Render(args) => {
            let instance = load_instance(&args.instance)?;
            let solution = load_solution(&args.solution)?;
            let frames = render_frames(&instance, &solution, &args.out)?;
            if args.html {
                let cost = evaluate_cost(&instance, &solution)?;
                render_report(&instance, &solution, &cost, &args.out.join("report.html"))?;
            }
            println!("{} frames -> {}", frames.len(), args.out.display());
        }
        Cmd::Compare(args) => {
            let rows: Vec<CompareRow> =
                args.instances.par_iter().map(|p| compare_one(p, &args.oracle, &file.oracle)).collect();
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r)?;
            }
            let csv_text = String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?;
            match &args.out {
                Some(path) => write_text(path, &csv_text)?,
                None => print!("{csv_text}"),
            }
            if args.json {
                println!("{}", serde_json::to_string(&rows)?);
            }
        }
    }
    Ok(ok)
}

fn exit_code(e: &anyhow::Error) -> (u8, &'static str) {
    match e.downcast_ref::<Error>() {
        Some(Error::InfeasibleImport(_) | Error::InfeasibleSolution(_)) => (2, "infeasible"),
        Some(Error::Parse { .. }) => (3, "parse"),
        Some(Error::Io { .. }) => (1, "io"),
        Some(Error::InstanceTooLarge { .. }) => (1, "instance_too_large"),
        Some(_) => (1, "invalid_input"),
        None => (1, "other"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let line = serde_json::json!({ "error": "usage", "code": 1, "message": e.kind().to_string() });
            eprintln!("{line}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(s) => ExitCode::from(s.code),
        Err(e) => {
            let (code, kind) = exit_code(&e);
            let mut line = serde_json::json!({ "error": kind, "code": code, "message": e.to_string() });
            if let Some(Error::InfeasibleImport(r) | Error::InfeasibleSolution(r)) = e.downcast_ref::<Error>() {
                line["violations"] = serde_json::to_value(&r.violations).unwrap_or_default();
            }
            eprintln!("{line}");
            ExitCode::from(code)
        }
    }
}
