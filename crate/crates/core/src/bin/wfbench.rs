//! Command-line front end for the experiment harness and single solver runs.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use wfqubo::anneal::{solve_layered, solve_multi_sa, AnnealParams, LayeredParams, MultiSaParams, QuboProblem};
use wfqubo::classical::{solve_exact, solve_exhaustive_oracle, solve_ga, solve_heft, ExactParams, GaParams};
use wfqubo::experiment::{
    run_experiment, ExperimentError, ExperimentId, ExperimentPlan, Setting, SolverEntry, SolverKind, Timing,
};
use wfqubo::model::{
    builtin_instance, generate_scaling_instance, load_instance, to_json, BuiltinInstance, ConstraintSet, ModelError,
    WorkflowInstance,
};
use wfqubo::report::SolverReport;
use wfqubo::strategy::run_strategy;

#[derive(Parser, Debug)]
#[command(
    name = "wfbench",
    version,
    about = "Workflow mapping benchmarks: QUBO annealing vs classical baselines"
)]
struct Cli {
    /// Base seed for every stochastic solver.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory (experiments, solve) or file (gen).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Instance file, or one of W1, W2, Medium_6T.
    #[arg(long, global = true)]
    instance: Option<String>,
    /// Solver name, e.g. exact, heft, ga, qubo-sa, qubo-multi-sa, qubo-layered, hybrid-repair.
    #[arg(long, global = true)]
    solver: Option<String>,
    /// Penalty multiplier for the single-run annealer.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Exact solver time limit in seconds.
    #[arg(long, global = true)]
    timeout: Option<f64>,
    /// Runs per solver (overrides the plan defaults).
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Write zero runtimes so results files are byte-identical across runs.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ground-truth validation on W1 and W2.
    Validate,
    /// Progressive constraint activation.
    Progressive,
    /// Penalty multiplier sweep for the single-run annealer.
    PenaltySweep,
    /// Generated instances of 5 to 20 tasks.
    Scaling,
    /// One solver on one instance.
    Solve,
    /// Emit a generated scaling instance as JSON.
    Gen {
        /// Number of tasks (5, 10, 15 or 20).
        #[arg(long, default_value_t = 10)]
        tasks: usize,
    },
    /// Certify an instance's optimum by exhaustive enumeration.
    Certify,
}

enum Failure {
    Invalid(String),
    Io(String),
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Io { .. } | ExperimentError::Csv { .. } => Failure::Io(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn resolve_instance(spec: &str) -> Result<WorkflowInstance, Failure> {
    match spec.parse::<BuiltinInstance>() {
        Ok(which) => Ok(builtin_instance(which)),
        Err(_) => Ok(load_instance(spec)?),
    }
}

fn timeout(cli: &Cli) -> Result<Duration, Failure> {
    match cli.timeout {
        None => Ok(ExactParams::default().timeout),
        Some(t) => Duration::try_from_secs_f64(t)
            .map_err(|_| Failure::Invalid(format!("timeout must be a non-negative number of seconds, got {t}"))),
    }
}

fn alpha(cli: &Cli) -> Result<Option<f64>, Failure> {
    match cli.alpha {
        Some(a) if !(a > 0.0 && a.is_finite()) => Err(Failure::Invalid(format!(
            "penalty multiplier must be positive, got {a}"
        ))),
        a => Ok(a),
    }
}

fn experiment(cli: &Cli, id: ExperimentId) -> Result<(), Failure> {
    let mut plan = match id {
        ExperimentId::Exp3 => ExperimentPlan::scaling(cli.seed),
        other => ExperimentPlan::for_id(other).with_seed(cli.seed),
    };
    plan.exact_timeout = timeout(cli)?;
    if cli.no_timing {
        plan.timing = Timing::Disabled;
    }
    if let Some(spec) = &cli.instance {
        plan.instances = vec![resolve_instance(spec)?];
    }
    if let Some(a) = alpha(cli)? {
        plan.default_alpha = a;
    }
    if let Some(name) = &cli.solver {
        let kind = SolverKind::parse(name).ok_or_else(|| Failure::Invalid(format!("unknown solver `{name}`")))?;
        let runs = plan.solvers.iter().find(|e| e.solver == kind).map_or(1, |e| e.runs);
        plan.solvers = vec![SolverEntry::new(kind, runs)];
        if id == ExperimentId::Exp1 && !plan.solvers[0].solver.uses_alpha() {
            plan.settings.retain(|s: &Setting| s.alpha.is_none());
        }
    }
    if let Some(runs) = cli.runs {
        for e in &mut plan.solvers {
            e.runs = runs;
        }
    }
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("results").join(id.as_str()));
    let outcome = run_experiment(&plan, &out)?;

    let mut stdout = io::stdout().lock();
    writeln!(
        stdout,
        "{:<12} {:<18} {:<22} {:>9} {:>12}",
        "instance", "setting", "solver", "feasible", "makespan_s"
    )?;
    for s in &outcome.summary {
        let span = s.mean_makespan.map_or_else(|| "-".to_string(), |m| format!("{m:.3}"));
        writeln!(
            stdout,
            "{:<12} {:<18} {:<22} {:>9} {:>12}",
            s.instance,
            s.stage_or_alpha,
            s.solver,
            format!("{}/{}", s.feasible_runs, s.runs),
            span
        )?;
    }
    for f in &outcome.files {
        writeln!(stdout, "wrote {}", f.display())?;
    }
    Ok(())
}

fn solve(cli: &Cli) -> Result<(), Failure> {
    let spec = cli
        .instance
        .as_deref()
        .ok_or_else(|| Failure::Invalid("solve needs --instance".into()))?;
    let name = cli
        .solver
        .as_deref()
        .ok_or_else(|| Failure::Invalid("solve needs --solver".into()))?;
    let kind = SolverKind::parse(name).ok_or_else(|| Failure::Invalid(format!("unknown solver `{name}`")))?;
    let instance = resolve_instance(spec)?;
    let c = ConstraintSet::all();
    let seed = cli.seed;
    let problem = QuboProblem::new(&instance, c);
    let report: SolverReport = match kind {
        SolverKind::Exact => solve_exact(&instance, &c, &ExactParams { timeout: timeout(cli)? }),
        SolverKind::Heft => solve_heft(&instance, &c),
        SolverKind::Ga => solve_ga(&instance, &c, &GaParams::default().with_seed(seed))
            .map_err(|e| Failure::Invalid(e.to_string()))?,
        SolverKind::QuboSa => problem.solve_sa(alpha(cli)?.unwrap_or(1.0), &AnnealParams::with_seed(seed)),
        SolverKind::QuboMultiSa => solve_multi_sa(
            &problem,
            &MultiSaParams {
                seed,
                ..MultiSaParams::default()
            },
        ),
        SolverKind::QuboLayered => solve_layered(
            &problem,
            &LayeredParams {
                seed,
                ..LayeredParams::default()
            },
        ),
        SolverKind::Strategy(config) => run_strategy(&config, &instance, &c, seed),
    };

    let mut stdout = io::stdout().lock();
    writeln!(stdout, "instance   {}", instance.name())?;
    writeln!(stdout, "solver     {}", report.solver)?;
    writeln!(stdout, "feasible   {}", report.feasible)?;
    if let Some(m) = report.makespan {
        writeln!(stdout, "makespan   {m}")?;
    }
    if let Some(u) = report.utilization {
        writeln!(stdout, "util       {u:.4}")?;
    }
    if let Some(tag) = &report.tag {
        writeln!(stdout, "tag        {tag}")?;
    }
    for v in &report.violations {
        writeln!(stdout, "violation  {}: {}", v.constraint, v.detail)?;
    }
    if let Some(mapping) = report.mapping() {
        let placed: Vec<String> = mapping
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &j)| format!("{}->{}", instance.tasks()[i].id, instance.nodes()[j].id))
            .collect();
        writeln!(stdout, "mapping    {}", placed.join(" "))?;
    }
    if let (Some(dir), Some(schedule)) = (&cli.out, &report.schedule) {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("schedule.csv");
        schedule
            .write_csv(&instance, File::create(&path)?)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        writeln!(stdout, "wrote {}", path.display())?;
    }
    Ok(())
}

fn generate(cli: &Cli, tasks: usize) -> Result<(), Failure> {
    let instance = generate_scaling_instance(tasks, cli.seed)?;
    let json = to_json(&instance);
    match &cli.out {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => writeln!(io::stdout().lock(), "{json}")?,
    }
    Ok(())
}

fn certify(cli: &Cli) -> Result<(), Failure> {
    let spec = cli
        .instance
        .as_deref()
        .ok_or_else(|| Failure::Invalid("certify needs --instance".into()))?;
    let instance = resolve_instance(spec)?;
    let report =
        solve_exhaustive_oracle(&instance, &ConstraintSet::all()).map_err(|e| Failure::Invalid(e.to_string()))?;
    let mut stdout = io::stdout().lock();
    match (report.makespan, report.mapping()) {
        (Some(m), Some(mapping)) => {
            writeln!(stdout, "{}: optimal makespan {m}", instance.name())?;
            for (i, &j) in mapping.nodes().iter().enumerate() {
                writeln!(stdout, "  {} -> {}", instance.tasks()[i].id, instance.nodes()[j].id)?;
            }
        }
        _ => writeln!(stdout, "{}: no feasible mapping", instance.name())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Validate => experiment(&cli, ExperimentId::Exp2),
        Command::Progressive => experiment(&cli, ExperimentId::Exp0),
        Command::PenaltySweep => experiment(&cli, ExperimentId::Exp1),
        Command::Scaling => experiment(&cli, ExperimentId::Exp3),
        Command::Solve => solve(&cli),
        Command::Gen { tasks } => generate(&cli, *tasks),
        Command::Certify => certify(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
