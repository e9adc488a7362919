//! `vnep`: command line driver for the embedding pipeline.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use vnep::decomposition::{
    decompose_mcf_tree, decompose_novel, verify_decomposition, ConvexDecomposition,
    DecompositionEntry, SolutionSlice,
};
use vnep::extraction::{build_extraction_order, SearchStrategy};
use vnep::lp::{
    build_mcf, build_novel, solver_by_name, write_lp_format, LpModel, LpSolution, LpSolver,
    LpStatus, Objective, DEFAULT_VAR_BUDGET, SOLVER_ENV,
};
use vnep::model::{resource_stats, validate_instance, MappingRecord, ValidationReport};
use vnep::oracle::{
    enumerate_valid_mappings, solve_enumerative, Relaxation, DEFAULT_MAPPING_CAP,
};
use vnep::pipeline::{request_orders, run_pipeline, PipelineConfig, PipelineError, RunReport};
use vnep::rounding::{
    compute_bounds, prune_costly_mappings, round_cost, round_profit, RoundedSolution,
    TryDiagnostics, DEFAULT_MAX_TRIES,
};
use vnep::scenario::{fixture, generate_scenario, ScenarioSpec, FIXTURE_NAMES};
use vnep::{Instance, RawInstance};

#[derive(Parser)]
#[command(name = "vnep", version, about = "Virtual network embedding via decomposable LPs and randomized rounding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance and print the validation report.
    Validate {
        instance: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Extraction order, labels and bags of every request.
    Width {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Strategy::PerRootBfs)]
        strategy: Strategy,
        #[command(flatten)]
        out: Out,
    },
    /// Build and solve the MCF or the decomposable LP.
    SolveLp {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Formulation::Novel)]
        formulation: Formulation,
        #[command(flatten)]
        lp: LpArgs,
        /// Also write the model in LP text format.
        #[arg(long)]
        export_lp: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Decompose a solution written by `solve-lp` into weighted valid mappings.
    Decompose {
        instance: PathBuf,
        solution: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Round a decomposition written by `decompose`.
    Round {
        instance: PathBuf,
        decomposition: PathBuf,
        #[command(flatten)]
        rounding: RoundingArgs,
        #[command(flatten)]
        csv: CsvArgs,
        #[command(flatten)]
        out: Out,
    },
    /// Solve the enumerative formulation over all valid mappings.
    Exact {
        instance: PathBuf,
        #[arg(long, default_value = "profit")]
        variant: Objective,
        #[arg(long, default_value = "ip")]
        relaxation: Relaxation,
        /// Mappings enumerated per request before giving up.
        #[arg(long, default_value_t = DEFAULT_MAPPING_CAP)]
        cap: usize,
        #[arg(long, env = SOLVER_ENV, default_value = "microlp")]
        solver: String,
        #[command(flatten)]
        out: Out,
    },
    /// Write a named fixture or a random scenario as instance JSON.
    Generate {
        /// One of the built-in fixtures; see `--list`.
        #[arg(long, conflicts_with = "spec")]
        fixture: Option<String>,
        /// Scenario spec JSON.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the fixture names.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Full pipeline on one or more instances.
    Run {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        #[command(flatten)]
        lp: LpArgs,
        #[command(flatten)]
        rounding: RoundingArgs,
        /// Instances processed in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Record stage wall-clock times in the report.
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        csv: CsvArgs,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args)]
struct Out {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct LpArgs {
    #[arg(long, default_value = "profit")]
    variant: Objective,
    #[arg(long, value_enum, default_value_t = Strategy::PerRootBfs)]
    strategy: Strategy,
    #[arg(long, env = SOLVER_ENV, default_value = "microlp")]
    solver: String,
    /// Largest decomposable LP to build, in variables.
    #[arg(long, default_value_t = DEFAULT_VAR_BUDGET)]
    var_budget: usize,
}

#[derive(Args, Clone)]
struct RoundingArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_TRIES)]
    max_tries: usize,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args)]
struct CsvArgs {
    /// Per-try diagnostics as CSV.
    #[arg(long)]
    tries_csv: Option<PathBuf>,
    /// Per-try diagnostics as long-format CSV (`instance,trial,metric,value`).
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Strategy {
    PerRootBfs,
    Exhaustive,
}

impl From<Strategy> for SearchStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::PerRootBfs => SearchStrategy::PerRootBfs,
            Strategy::Exhaustive => SearchStrategy::Exhaustive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Formulation {
    Mcf,
    Novel,
}

enum Failure {
    Validation(String),
    Infeasible(String),
    Unaccepted,
    Internal(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Unaccepted => 4,
            Failure::Internal(_) => 5,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

type Outcome = Result<(), Failure>;

fn write_out(out: &Out, text: &str) -> Outcome {
    match &out.out {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").context("writing stdout")?;
        }
    }
    Ok(())
}

fn emit(out: &Out, value: &impl Serialize) -> Outcome {
    write_out(out, &serde_json::to_string_pretty(value).context("serializing output")?)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn read_raw(path: &Path) -> Result<RawInstance, Failure> {
    read_json(path)
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    read_raw(path)?.build().map_err(|rep| {
        let lines: Vec<String> = rep.issues.iter().map(|i| format!("{}: {}", i.location, i.message)).collect();
        Failure::Validation(format!("{}: {}", path.display(), lines.join("; ")))
    })
}

fn solver(name: &str) -> Result<Box<dyn LpSolver>, Failure> {
    solver_by_name(name).map_err(|e| Failure::Internal(e.into()))
}

fn cmd_validate(instance: &Path, out: &Out) -> Outcome {
    let raw = read_raw(instance)?;
    let rep: ValidationReport = validate_instance(&raw);
    emit(out, &rep)?;
    if rep.passed() {
        Ok(())
    } else {
        Err(Failure::Validation(format!("{} issue(s)", rep.issues.len())))
    }
}

#[derive(Serialize)]
struct WidthRow {
    request: String,
    root: String,
    width: usize,
    labels: Vec<EdgeLabels>,
    bags: Vec<NodeBags>,
}

#[derive(Serialize)]
struct EdgeLabels {
    tail: String,
    head: String,
    reversed: bool,
    labels: Vec<String>,
}

#[derive(Serialize)]
struct NodeBags {
    node: String,
    bags: Vec<BagRow>,
}

#[derive(Serialize)]
struct BagRow {
    edges: Vec<(String, String)>,
    labels: Vec<String>,
}

fn cmd_width(instance: &Path, strategy: Strategy, out: &Out) -> Outcome {
    let inst = read_instance(instance)?;
    let orders = request_orders(&inst, strategy.into()).map_err(|e| Failure::Internal(e.into()))?;
    let rows: Vec<WidthRow> = inst
        .requests
        .iter()
        .zip(&orders)
        .map(|(req, o)| {
            let names = req.topology().node_names;
            let name = |v: usize| names[v].clone();
            let edge = |e: usize| (name(o.order.edges[e].tail), name(o.order.edges[e].head));
            WidthRow {
                request: req.id().to_string(),
                root: name(o.root()),
                width: o.width,
                labels: o
                    .order
                    .edges
                    .iter()
                    .zip(&o.labels)
                    .map(|(e, l)| EdgeLabels {
                        tail: name(e.tail),
                        head: name(e.head),
                        reversed: e.reversed,
                        labels: l.iter().map(|&j| name(j)).collect(),
                    })
                    .collect(),
                bags: o
                    .bags
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| !b.is_empty())
                    .map(|(v, bags)| NodeBags {
                        node: name(v),
                        bags: bags
                            .iter()
                            .map(|b| BagRow {
                                edges: b.edges.iter().map(|&e| edge(e)).collect(),
                                labels: b.labels.iter().map(|&j| name(j)).collect(),
                            })
                            .collect(),
                    })
                    .collect(),
            }
        })
        .collect();
    emit(out, &rows)
}

/// Everything `decompose` needs to rebuild the variable index of a solved model.
#[derive(Serialize, Deserialize)]
struct SolvedLp {
    formulation: Formulation,
    variant: Objective,
    strategy: Strategy,
    var_budget: usize,
    solver: String,
    variables: usize,
    constraints: usize,
    solution: LpSolution,
}

enum Index {
    Mcf(vnep::lp::McfVariableIndex),
    Novel(vnep::lp::NovelVariableIndex),
}

fn build_model(
    inst: &Instance,
    formulation: Formulation,
    variant: Objective,
    strategy: Strategy,
    var_budget: usize,
) -> Result<(LpModel, Index), Failure> {
    Ok(match formulation {
        Formulation::Mcf => {
            let (m, ix) = build_mcf(inst, variant);
            (m, Index::Mcf(ix))
        }
        Formulation::Novel => {
            let orders = request_orders(inst, strategy.into()).map_err(|e| Failure::Internal(e.into()))?;
            let (m, ix) = build_novel(inst, &orders, variant, var_budget).map_err(|e| Failure::Internal(e.into()))?;
            (m, Index::Novel(ix))
        }
    })
}

fn check_status(status: LpStatus) -> Outcome {
    match status {
        LpStatus::Optimal => Ok(()),
        LpStatus::Infeasible => Err(Failure::Infeasible("LP is infeasible".into())),
        other => Err(Failure::Internal(anyhow!("solver returned {other:?}"))),
    }
}

fn cmd_solve_lp(
    instance: &Path,
    formulation: Formulation,
    lp: &LpArgs,
    export_lp: Option<&Path>,
    out: &Out,
) -> Outcome {
    let inst = read_instance(instance)?;
    let (model, _) = build_model(&inst, formulation, lp.variant, lp.strategy, lp.var_budget)?;
    if let Some(p) = export_lp {
        fs::write(p, write_lp_format(&model)).with_context(|| format!("writing {}", p.display()))?;
    }
    let backend = solver(&lp.solver)?;
    let solution = backend.solve(&model);
    let status = solution.status;
    emit(
        out,
        &SolvedLp {
            formulation,
            variant: lp.variant,
            strategy: lp.strategy,
            var_budget: lp.var_budget,
            solver: backend.name().to_string(),
            variables: model.num_vars(),
            constraints: model.constraints.len(),
            solution,
        },
    )?;
    check_status(status)
}

#[derive(Serialize, Deserialize)]
struct DecompositionFile {
    variant: Objective,
    lp_objective: f64,
    requests: Vec<RequestDecomposition>,
}

#[derive(Serialize, Deserialize)]
struct RequestDecomposition {
    request: String,
    x: f64,
    entries: Vec<DecompositionEntry>,
}

fn cmd_decompose(instance: &Path, solution: &Path, out: &Out) -> Outcome {
    let inst = read_instance(instance)?;
    let solved: SolvedLp = read_json(solution)?;
    check_status(solved.solution.status)?;
    let (model, index) = build_model(&inst, solved.formulation, solved.variant, solved.strategy, solved.var_budget)?;
    if model.num_vars() != solved.solution.values.len() {
        return Err(Failure::Validation(format!(
            "solution has {} values but the rebuilt model has {} variables",
            solved.solution.values.len(),
            model.num_vars()
        )));
    }
    let sol = &solved.solution;
    let mut requests = Vec::new();
    for (r, req) in inst.requests.iter().enumerate() {
        let (d, slice) = match &index {
            Index::Mcf(ix) => {
                let order = build_extraction_order(&req.topology(), 0).map_err(|e| Failure::Internal(e.into()))?;
                let d = decompose_mcf_tree(&inst.substrate, req, &order, &ix.requests[r], &sol.values);
                (d, SolutionSlice::from_mcf(&inst.substrate, &ix.requests[r], sol))
            }
            Index::Novel(ix) => (
                decompose_novel(&inst.substrate, req, &ix.requests[r], &sol.values),
                SolutionSlice::from_novel(&ix.requests[r], sol),
            ),
        };
        let d = d.map_err(|e| Failure::Internal(anyhow!("request {}: {e}", req.id())))?;
        let rep = verify_decomposition(&inst.substrate, req, &d, &slice);
        if !rep.passed {
            return Err(Failure::Internal(anyhow!("request {}: decomposition check failed: {rep:?}", req.id())));
        }
        requests.push(RequestDecomposition {
            request: req.id().to_string(),
            x: slice.x,
            entries: d.to_records(&inst.substrate, req),
        });
    }
    emit(
        out,
        &DecompositionFile {
            variant: solved.variant,
            lp_objective: sol.objective,
            requests,
        },
    )
}

fn write_csvs(csv: &CsvArgs, runs: &[(String, &[TryDiagnostics])]) -> Outcome {
    if let Some(p) = &csv.tries_csv {
        let mut w = csv::Writer::from_path(p).with_context(|| format!("writing {}", p.display()))?;
        w.write_record(["instance", "trial", "objective", "max_node_utilization", "max_edge_utilization", "accepted"])
            .context("csv")?;
        for (name, tries) in runs {
            for t in tries.iter() {
                w.write_record([
                    name.clone(),
                    t.trial.to_string(),
                    t.objective.to_string(),
                    t.max_node_utilization.to_string(),
                    t.max_edge_utilization.to_string(),
                    t.accepted.to_string(),
                ])
                .context("csv")?;
            }
        }
        w.flush().context("csv")?;
    }
    if let Some(p) = &csv.plot_data {
        let mut w = csv::Writer::from_path(p).with_context(|| format!("writing {}", p.display()))?;
        w.write_record(["instance", "trial", "metric", "value"]).context("csv")?;
        for (name, tries) in runs {
            for t in tries.iter() {
                let metrics = [
                    ("objective", t.objective),
                    ("max_node_utilization", t.max_node_utilization),
                    ("max_edge_utilization", t.max_edge_utilization),
                    ("accepted", f64::from(u8::from(t.accepted))),
                ];
                for (m, v) in metrics {
                    w.write_record([name.clone(), t.trial.to_string(), m.to_string(), v.to_string()])
                        .context("csv")?;
                }
            }
        }
        w.flush().context("csv")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RoundOutput {
    variant: Objective,
    bounds: vnep::rounding::RoundingBounds,
    selected: Vec<Option<MappingRecord>>,
    solution: RoundedSolution,
}

fn cmd_round(instance: &Path, decomposition: &Path, args: &RoundingArgs, csv: &CsvArgs, out: &Out) -> Outcome {
    let inst = read_instance(instance)?;
    let file: DecompositionFile = read_json(decomposition)?;
    let mut decomps = Vec::with_capacity(inst.requests.len());
    for req in &inst.requests {
        let rd = file
            .requests
            .iter()
            .find(|d| d.request == req.id())
            .ok_or_else(|| Failure::Validation(format!("no decomposition for request {}", req.id())))?;
        decomps.push(
            ConvexDecomposition::from_records(&rd.entries, &inst.substrate, req)
                .map_err(|e| Failure::Validation(format!("request {}: {e}", req.id())))?,
        );
    }
    let variant = file.variant;
    let bounds = compute_bounds(&inst, &resource_stats(&inst), variant)
        .map_err(|e| Failure::Internal(e.into()))?
        .with_overrides(args.alpha, args.beta, args.gamma);
    let solution = match variant {
        Objective::Profit => round_profit(&inst, &decomps, &bounds, file.lp_objective, args.max_tries, args.seed),
        Objective::Cost => {
            let pruned = decomps
                .iter()
                .enumerate()
                .map(|(r, d)| prune_costly_mappings(&inst, r, d).map(|p| p.decomposition))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Internal(e.into()))?;
            let s = round_cost(&inst, &pruned, &bounds, file.lp_objective, args.max_tries, args.seed)
                .map_err(|e| Failure::Internal(e.into()))?;
            decomps = pruned;
            s
        }
    };
    let selected = solution
        .selection
        .iter()
        .zip(&decomps)
        .zip(&inst.requests)
        .map(|((s, d), req)| s.map(|k| d.entries[k].1.to_record(&inst.substrate, req)))
        .collect();
    write_csvs(csv, &[(instance.display().to_string(), &solution.tries)])?;
    let accepted = solution.accepted;
    emit(
        out,
        &RoundOutput {
            variant,
            bounds,
            selected,
            solution,
        },
    )?;
    if accepted {
        Ok(())
    } else {
        Err(Failure::Unaccepted)
    }
}

#[derive(Serialize)]
struct ExactOutput {
    variant: Objective,
    relaxation: Relaxation,
    status: LpStatus,
    optimum: f64,
    requests: Vec<ExactRequest>,
}

#[derive(Serialize)]
struct ExactRequest {
    request: String,
    mappings: usize,
    /// Mappings with positive weight.
    assignment: Vec<DecompositionEntry>,
}

fn cmd_exact(
    instance: &Path,
    variant: Objective,
    relaxation: Relaxation,
    cap: usize,
    solver_name: &str,
    out: &Out,
) -> Outcome {
    let inst = read_instance(instance)?;
    let enums: Vec<_> = inst
        .requests
        .iter()
        .map(|r| enumerate_valid_mappings(&inst.substrate, r, cap))
        .collect();
    let backend = solver(solver_name)?;
    let sol = solve_enumerative(&inst, &enums, variant, relaxation, backend.as_ref())
        .map_err(|e| Failure::Internal(e.into()))?;
    let requests = inst
        .requests
        .iter()
        .zip(&enums)
        .zip(&sol.weights)
        .map(|((req, en), w)| ExactRequest {
            request: req.id().to_string(),
            mappings: en.mappings.len(),
            assignment: en
                .mappings
                .iter()
                .zip(w)
                .filter(|(_, &f)| f > 1e-9)
                .map(|(m, &f)| DecompositionEntry {
                    weight: f,
                    mapping: m.to_record(&inst.substrate, req),
                })
                .collect(),
        })
        .collect();
    let status = sol.status;
    emit(
        out,
        &ExactOutput {
            variant,
            relaxation,
            status,
            optimum: sol.optimum,
            requests,
        },
    )?;
    check_status(status)
}

fn cmd_generate(fixture_name: Option<&str>, spec: Option<&Path>, seed: u64, list: bool, out: &Out) -> Outcome {
    if list {
        return write_out(out, &FIXTURE_NAMES.join("\n"));
    }
    let raw = match (fixture_name, spec) {
        (Some(name), _) => fixture(name, seed).map_err(|e| Failure::Validation(e.to_string()))?,
        (None, Some(p)) => {
            let mut s: ScenarioSpec = read_json(p)?;
            if seed != 0 {
                s.seed = seed;
            }
            generate_scenario(&s)
        }
        (None, None) => return Err(Failure::Validation("pass --fixture, --spec or --list".into())),
    };
    write_out(out, &raw.to_json())
}

#[derive(Serialize)]
struct RunEntry {
    instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<RunReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

struct RunResult {
    entry: RunEntry,
    tries: Vec<TryDiagnostics>,
    code: u8,
}

fn run_one(path: &Path, config: &PipelineConfig, solver_name: &str) -> RunResult {
    let name = path.display().to_string();
    let fail = |f: Failure| {
        let msg = match &f {
            Failure::Validation(m) | Failure::Infeasible(m) => m.clone(),
            Failure::Unaccepted => "rounding not accepted".into(),
            Failure::Internal(e) => format!("{e:#}"),
        };
        RunResult {
            entry: RunEntry {
                instance: name.clone(),
                report: None,
                error: Some(msg),
            },
            tries: Vec::new(),
            code: f.code(),
        }
    };
    let inst = match read_instance(path) {
        Ok(i) => i,
        Err(f) => return fail(f),
    };
    let backend = match solver(solver_name) {
        Ok(b) => b,
        Err(f) => return fail(f),
    };
    match run_pipeline(&inst, config, backend.as_ref()) {
        Ok(o) => {
            let code = if o.report.rounding.accepted { 0 } else { Failure::Unaccepted.code() };
            RunResult {
                entry: RunEntry {
                    instance: name,
                    report: Some(o.report),
                    error: None,
                },
                tries: o.rounded.tries,
                code,
            }
        }
        Err(PipelineError::LpStatus(LpStatus::Infeasible)) => fail(Failure::Infeasible("LP is infeasible".into())),
        Err(e) => fail(Failure::Internal(e.into())),
    }
}

fn cmd_run(
    instances: &[PathBuf],
    lp: &LpArgs,
    rounding: &RoundingArgs,
    jobs: usize,
    timings: bool,
    csv: &CsvArgs,
    out: &Out,
) -> Outcome {
    let config = PipelineConfig {
        objective: lp.variant,
        seed: rounding.seed,
        max_tries: rounding.max_tries,
        strategy: lp.strategy.into(),
        var_budget: lp.var_budget,
        alpha: rounding.alpha,
        beta: rounding.beta,
        gamma: rounding.gamma,
        timings,
    };
    let jobs = jobs.clamp(1, instances.len().max(1));
    let chunk = instances.len().div_ceil(jobs);
    let results: Vec<RunResult> = std::thread::scope(|s| {
        let handles: Vec<_> = instances
            .chunks(chunk.max(1))
            .map(|paths| {
                let config = &config;
                let solver = lp.solver.as_str();
                s.spawn(move || paths.iter().map(|p| run_one(p, config, solver)).collect::<Vec<_>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let runs: Vec<(String, &[TryDiagnostics])> = results
        .iter()
        .map(|r| (r.entry.instance.clone(), r.tries.as_slice()))
        .collect();
    write_csvs(csv, &runs)?;
    if let [single] = results.as_slice() {
        match &single.entry.report {
            Some(report) => emit(out, report)?,
            None => emit(out, &single.entry)?,
        }
    } else {
        let entries: Vec<&RunEntry> = results.iter().map(|r| &r.entry).collect();
        emit(out, &entries)?;
    }
    for r in &results {
        if let Some(e) = &r.entry.error {
            eprintln!("{}: {e}", r.entry.instance);
        }
    }
    match results.iter().map(|r| r.code).max().unwrap_or(0) {
        0 => Ok(()),
        2 => Err(Failure::Validation("see report".into())),
        3 => Err(Failure::Infeasible("see report".into())),
        4 => Err(Failure::Unaccepted),
        _ => Err(Failure::Internal(anyhow!("see report"))),
    }
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { instance, out } => cmd_validate(&instance, &out),
        Command::Width { instance, strategy, out } => cmd_width(&instance, strategy, &out),
        Command::SolveLp {
            instance,
            formulation,
            lp,
            export_lp,
            out,
        } => cmd_solve_lp(&instance, formulation, &lp, export_lp.as_deref(), &out),
        Command::Decompose {
            instance,
            solution,
            out,
        } => cmd_decompose(&instance, &solution, &out),
        Command::Round {
            instance,
            decomposition,
            rounding,
            csv,
            out,
        } => cmd_round(&instance, &decomposition, &rounding, &csv, &out),
        Command::Exact {
            instance,
            variant,
            relaxation,
            cap,
            solver,
            out,
        } => cmd_exact(&instance, variant, relaxation, cap, &solver, &out),
        Command::Generate {
            fixture,
            spec,
            seed,
            list,
            out,
        } => cmd_generate(fixture.as_deref(), spec.as_deref(), seed, list, &out),
        Command::Run {
            instances,
            lp,
            rounding,
            jobs,
            timings,
            csv,
            out,
        } => cmd_run(&instances, &lp, &rounding, jobs, timings, &csv, &out),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Validation(m) => eprintln!("validation failed: {m}"),
                Failure::Infeasible(m) => eprintln!("infeasible: {m}"),
                Failure::Unaccepted => eprintln!("rounding did not reach the approximation bounds"),
                Failure::Internal(e) => eprintln!("error: {e:#}"),
            }
            ExitCode::from(f.code())
        }
    }
}
