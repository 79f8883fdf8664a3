use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use qualcomp::best_response::is_nash_equilibrium;
use qualcomp::dynamics::{run_dynamics, DynamicsConfig, Recording, VisitOrder};
use qualcomp::equilibrium::{
    isolated_paths_equilibrium, nbs_global, quartic_equilibrium, single_path_equilibrium,
    single_path_nbs, solve_homogeneous, two_path_equilibrium, EquilibriumResult, HomogeneousParams,
    HomogeneousSpec,
};
use qualcomp::experiments::{emit_csv, emit_plot_data, run_plan, ExperimentPlan};
use qualcomp::model::{path_valuations, profits};
use qualcomp::netgen::{
    build_competition_pair_homogeneous, build_homogeneous, build_topology_model,
    build_two_path_pair, format_as_graph, ingest_as_graph, synthetic_as_graph,
    synthetic_topology_model, SyntheticGraphConfig, TopologyConfig, TwoPathSide,
};
use qualcomp::verify::{find_suite, run_all, run_suite, SuiteReport, SUITES};
use qualcomp::{AttributeMatrix, NetworkModel};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERIC: u8 = 2;

/// Quality competition among ISPs on overlapping paths.
#[derive(Debug, Parser)]
#[command(name = "qualcomp", version, about)]
struct Cli {
    /// Seed for randomized inputs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (or directory for `experiment`); standard output if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON input of the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Numeric tolerance: convergence threshold for `dynamics`, Nash check for `solve`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a model from a spec, an AS graph or the synthetic generator.
    Gen(GenArgs),
    /// Compute an equilibrium or bargaining solution.
    Solve(SolveArgs),
    /// Simulate round-robin or continuous-time dynamics.
    Dynamics(DynamicsArgs),
    /// Run a path-diversity experiment plan.
    Experiment,
    /// Run randomized verification suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    /// `--config` holds a homogeneous spec.
    Homogeneous,
    /// `--config` holds `{q, i, d_prime, alpha1, alpha0, phi1, phi0, gamma1, rho}`.
    CompetitionPair,
    /// `--config` holds `{r, rbar, d_r, d_rbar}` with one path side each.
    TwoPathPair,
    /// Topology model; `--config` holds optional topology settings.
    Topology,
    /// Synthetic AS graph in the relationship text format.
    Graph,
}

#[derive(Debug, Args)]
struct GenArgs {
    kind: GenKind,
    /// Relationship file to build the topology from instead of a synthetic graph.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// For `topology`, write only the network model.
    #[arg(long)]
    model_only: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverChoice {
    /// `--config` holds a homogeneous spec.
    Homogeneous,
    SinglePath,
    SinglePathNbs,
    Isolated,
    TwoPath,
    Quartic,
    Nbs,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    solver: SolverChoice,
    /// Path index for the single-path solvers.
    #[arg(long, default_value_t = 0)]
    path: usize,
    /// Iteration cap of the bargaining search.
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeChoice {
    RoundRobin,
    Ode,
}

#[derive(Debug, Args)]
struct DynamicsArgs {
    #[arg(long, value_enum, default_value = "round-robin")]
    mode: ModeChoice,
    /// Damping of round-robin moves.
    #[arg(long)]
    eta: Option<f64>,
    /// Euler step of the continuous-time dynamics.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    max_rounds: Option<usize>,
    /// `zeros`, `lower`, `random:<seed>` or a JSON file of attribute rows.
    #[arg(long, default_value = "lower")]
    start: String,
    /// Upper end of uniform random starts.
    #[arg(long, default_value_t = 1.0)]
    start_max: f64,
    /// Visit coordinates in a fresh seeded order every round.
    #[arg(long)]
    shuffle: bool,
    /// Write the full trajectory as CSV to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite name or alias, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// List the suites and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Debug, Deserialize)]
struct CompetitionPairInput {
    q: usize,
    i: usize,
    d_prime: f64,
    #[serde(flatten)]
    params: HomogeneousParams,
}

#[derive(Debug, Deserialize)]
struct TwoPathPairInput {
    r: TwoPathSide,
    rbar: TwoPathSide,
    d_r: f64,
    d_rbar: f64,
}

#[derive(Debug, Serialize)]
struct DynamicsSummary {
    converged: bool,
    rounds: usize,
    final_residual: f64,
    attributes: Vec<Vec<f64>>,
    path_valuations: Vec<f64>,
    profits: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct ExperimentSummary {
    rows: usize,
    cells: usize,
    nonconverged_cells: usize,
    diagnostics: Vec<String>,
}

/// Failure that maps to the numeric exit code.
#[derive(Debug)]
struct NumericFailure(String);

impl std::fmt::Display for NumericFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericFailure {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let numeric = e.downcast_ref::<NumericFailure>().is_some()
                || e.downcast_ref::<qualcomp::Error>()
                    .is_some_and(qualcomp::Error::is_numeric);
            ExitCode::from(if numeric { EXIT_NUMERIC } else { EXIT_USAGE })
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Gen(args) => gen(cli, args),
        Command::Solve(args) => solve(cli, args),
        Command::Dynamics(args) => dynamics(cli, args),
        Command::Experiment => experiment(cli),
        Command::Verify(args) => verify(cli, args),
    }
}

fn read_config(cli: &Cli) -> anyhow::Result<Option<String>> {
    cli.config
        .as_ref()
        .map(|p| std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())))
        .transpose()
}

fn require_config<T: serde::de::DeserializeOwned>(cli: &Cli) -> anyhow::Result<T> {
    let text = read_config(cli)?.ok_or_else(|| anyhow!("--config is required"))?;
    serde_json::from_str(&text).context("parsing --config")
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => stdout_line(text.trim_end()),
    }
}

/// Prints to standard output; a closed pipe is not an error.
fn stdout_line(text: &str) -> anyhow::Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit_json<T: Serialize>(cli: &Cli, value: &T) -> anyhow::Result<()> {
    emit(cli, &serde_json::to_string_pretty(value)?)
}

fn topology_config(cli: &Cli) -> anyhow::Result<TopologyConfig> {
    let mut cfg: TopologyConfig = match read_config(cli)? {
        Some(text) => serde_json::from_str(&text).context("parsing topology settings")?,
        None => TopologyConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.graph.seed = seed;
        cfg.profile.seed = seed;
    }
    Ok(cfg)
}

fn gen(cli: &Cli, args: &GenArgs) -> anyhow::Result<()> {
    match args.kind {
        GenKind::Homogeneous => {
            let spec: HomogeneousSpec = require_config(cli)?;
            emit_json(cli, &build_homogeneous(&spec)?)
        }
        GenKind::CompetitionPair => {
            let input: CompetitionPairInput = require_config(cli)?;
            emit_json(
                cli,
                &build_competition_pair_homogeneous(
                    input.q,
                    input.i,
                    input.d_prime,
                    &input.params,
                )?,
            )
        }
        GenKind::TwoPathPair => {
            let input: TwoPathPairInput = require_config(cli)?;
            emit_json(
                cli,
                &build_two_path_pair(&input.r, &input.rbar, input.d_r, input.d_rbar)?,
            )
        }
        GenKind::Topology => {
            let cfg = topology_config(cli)?;
            let topo = match &args.graph {
                Some(path) => build_topology_model(&ingest_as_graph(path)?, &cfg)?,
                None => synthetic_topology_model(&cfg)?,
            };
            if args.model_only {
                emit_json(cli, &topo.model)
            } else {
                emit_json(cli, &topo)
            }
        }
        GenKind::Graph => {
            let mut cfg: SyntheticGraphConfig = match read_config(cli)? {
                Some(text) => serde_json::from_str(&text).context("parsing graph settings")?,
                None => SyntheticGraphConfig::default(),
            };
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            emit(cli, &format_as_graph(&synthetic_as_graph(&cfg)?))
        }
    }
}

fn solve(cli: &Cli, args: &SolveArgs) -> anyhow::Result<()> {
    let (model, result): (NetworkModel, EquilibriumResult) = match args.solver {
        SolverChoice::Homogeneous => {
            let spec: HomogeneousSpec = require_config(cli)?;
            (build_homogeneous(&spec)?, solve_homogeneous(&spec)?)
        }
        choice => {
            let model: NetworkModel = require_config(cli)?;
            model.validate()?;
            let result = match choice {
                SolverChoice::SinglePath => single_path_equilibrium(&model, args.path)?,
                SolverChoice::SinglePathNbs => single_path_nbs(&model, args.path)?,
                SolverChoice::Isolated => isolated_paths_equilibrium(&model)?,
                SolverChoice::TwoPath => two_path_equilibrium(&model)?,
                SolverChoice::Quartic => quartic_equilibrium(&model)?,
                SolverChoice::Nbs => nbs_global(&model, args.max_iters)?,
                SolverChoice::Homogeneous => unreachable!("handled above"),
            };
            (model, result)
        }
    };
    emit_json(cli, &result)?;
    let bargaining = matches!(args.solver, SolverChoice::SinglePathNbs | SolverChoice::Nbs);
    if !bargaining {
        let tol = cli.tol.unwrap_or(1e-6);
        let check = is_nash_equilibrium(&model, &result.attributes, tol)?;
        if !check.holds {
            return Err(NumericFailure(format!(
                "result fails the Nash check: residual {:e} exceeds {tol:e}",
                check.max_residual
            ))
            .into());
        }
    }
    Ok(())
}

fn start_state(model: &NetworkModel, spec: &str, max: f64) -> anyhow::Result<AttributeMatrix> {
    if spec == "zeros" {
        return Ok(model.zero_attributes());
    }
    if spec == "lower" {
        return Ok(model.lower_bound_matrix());
    }
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed
            .parse()
            .with_context(|| format!("invalid seed in --start {spec}"))?;
        if !(max > 0.0 && max.is_finite()) {
            bail!("--start-max must be positive");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok(qualcomp::sampling::attributes(&mut rng, model, max));
    }
    let text =
        std::fs::read_to_string(spec).with_context(|| format!("reading start state {spec}"))?;
    let rows: Vec<Vec<f64>> = serde_json::from_str(&text).context("parsing start state")?;
    let a = AttributeMatrix::from_rows(rows)?;
    model.check_dims(&a)?;
    Ok(a)
}

fn dynamics(cli: &Cli, args: &DynamicsArgs) -> anyhow::Result<()> {
    let model: NetworkModel = require_config(cli)?;
    model.validate()?;
    let mut config = match args.mode {
        ModeChoice::RoundRobin => DynamicsConfig::round_robin(),
        ModeChoice::Ode => DynamicsConfig::ode(),
    };
    match (args.mode, args.eta, args.step) {
        (ModeChoice::RoundRobin, _, Some(_)) => bail!("--step applies to --mode ode; use --eta"),
        (ModeChoice::Ode, Some(_), _) => bail!("--eta applies to --mode round-robin; use --step"),
        (_, Some(v), _) | (_, _, Some(v)) => config.step = v,
        _ => {}
    }
    if let Some(tol) = cli.tol {
        config.tol = tol;
    }
    if let Some(m) = args.max_rounds {
        config.max_rounds = m;
    }
    if args.shuffle {
        config.order = VisitOrder::SeededShuffle;
    }
    config.seed = cli.seed.unwrap_or(0);
    config.recording = if args.trace.is_some() {
        Recording::All
    } else {
        Recording::Endpoints
    };
    config.validate()?;

    let start = start_state(&model, &args.start, args.start_max)?;
    let trace = run_dynamics(&model, &start, &config)?;
    if let Some(path) = &args.trace {
        std::fs::write(path, trace.to_csv())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let last = trace.final_state();
    emit_json(
        cli,
        &DynamicsSummary {
            converged: trace.converged,
            rounds: trace.rounds,
            final_residual: trace.final_residual,
            attributes: last.to_rows(),
            path_valuations: path_valuations(&model, last)?,
            profits: profits(&model, last)?,
        },
    )?;
    if !trace.converged {
        return Err(NumericFailure(format!(
            "no convergence within {} rounds",
            config.max_rounds
        ))
        .into());
    }
    Ok(())
}

/// Reads a plan; a plan without `base_model` may give `topology` settings
/// instead, from which the base model is generated.
fn load_plan(text: &str) -> anyhow::Result<ExperimentPlan> {
    let mut value: serde_json::Value = serde_json::from_str(text).context("parsing plan")?;
    let object = value
        .as_object_mut()
        .ok_or_else(|| anyhow!("plan must be a JSON object"))?;
    if !object.contains_key("base_model") {
        let settings = object
            .remove("topology")
            .ok_or_else(|| anyhow!("plan needs base_model or topology"))?;
        let cfg: TopologyConfig =
            serde_json::from_value(settings).context("parsing topology settings")?;
        let topo = synthetic_topology_model(&cfg)?;
        object.insert("base_model".into(), serde_json::to_value(topo.model)?);
    }
    serde_json::from_value(value).context("parsing plan")
}

fn experiment(cli: &Cli) -> anyhow::Result<()> {
    let text = read_config(cli)?.ok_or_else(|| anyhow!("--config is required"))?;
    let dir = cli
        .out
        .as_deref()
        .ok_or_else(|| anyhow!("--out <dir> is required"))?;
    let mut plan = load_plan(&text)?;
    if let Some(seed) = cli.seed {
        plan.seed = seed;
    }
    let output = run_plan(&plan)?;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    emit_csv(&output.rows, &dir.join("metrics.csv"))?;
    emit_plot_data(&output.rows, &dir.join("plot"))?;
    write_json(&dir.join("cells.json"), &output.cells)?;
    let summary = ExperimentSummary {
        rows: output.rows.len(),
        cells: output.cells.len(),
        nonconverged_cells: output.cells.iter().filter(|c| !c.converged).count(),
        diagnostics: output.diagnostics,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    stdout_line(&serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)
        .with_context(|| format!("writing {}", path.display()))
}

fn print_report(report: &SuiteReport) -> anyhow::Result<()> {
    stdout_line(&format!(
        "{} [{}]",
        report.summary(),
        if report.passed() { "PASS" } else { "FAIL" }
    ))?;
    for f in &report.failures {
        stdout_line(&format!("  {f}"))?;
    }
    Ok(())
}

fn verify(cli: &Cli, args: &VerifyArgs) -> anyhow::Result<()> {
    if args.list {
        for s in SUITES {
            let aliases = if s.aliases.is_empty() {
                String::new()
            } else {
                format!(" ({})", s.aliases.join(", "))
            };
            stdout_line(&format!("{}{aliases}: {}", s.name, s.description))?;
        }
        return Ok(());
    }
    let seed = cli.seed.unwrap_or(0);
    let reports = if args.suite == "all" {
        run_all(seed)
    } else {
        if find_suite(&args.suite).is_none() {
            bail!("unknown suite {}; see --list", args.suite);
        }
        vec![run_suite(&args.suite, seed)?]
    };
    for report in &reports {
        print_report(report)?;
    }
    if let Some(path) = &cli.out {
        write_json(path, &reports)?;
    }
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name.as_str())
        .collect();
    if !failed.is_empty() {
        return Err(NumericFailure(format!("failing suites: {}", failed.join(", "))).into());
    }
    Ok(())
}
