use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bayesbound::checks::run_checks;
use bayesbound::config::load_config;
use bayesbound::model::compute_averages;
use bayesbound::report::{self, BoundKind, RunPlan, SweepAxis};
use bayesbound::sdp::{
    backend_by_name, bh_lambda_problem, bh_thetadep_problem, bnh_problem, SolverBackend, BACKEND_ENV_VAR,
};
use bayesbound::{catalog, Scenario};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bayesbound", version, about = "Bayesian lower bounds for quantum parameter estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate bounds on the configured (or catalog) scenarios.
    Run(RunArgs),
    /// Evaluate bounds along a sweep axis.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Axis to sweep: lambda, prior_width or node_count.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// List the built-in scenarios.
    Catalog,
    /// Run the invariant suite; exits non-zero if any check fails.
    Check {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = bayesbound::sdp::DEFAULT_SOLVER_TOL)]
        tol: f64,
        #[arg(long, env = BACKEND_ENV_VAR, default_value = "clarabel")]
        backend: String,
        /// Also write check.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML or JSON config; the whole catalog when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated bound names.
    #[arg(long, value_delimiter = ',')]
    bounds: Vec<String>,
    /// Comma-separated λ values for bld and bh_lambda.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambdas: Vec<f64>,
    #[arg(long)]
    lambda_grid: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, env = BACKEND_ENV_VAR, default_value = "clarabel")]
    backend: String,
    /// Depolarize every state by this ε before evaluating.
    #[arg(long)]
    depolarize: Option<f64>,
    /// Restrict to scenarios with these names.
    #[arg(long, value_delimiter = ',')]
    scenario: Vec<String>,
    /// Write the SDPs as text under <out>/sdp/.
    #[arg(long)]
    dump_sdp: bool,
    /// Record wall-clock time per bound (makes output non-reproducible).
    #[arg(long)]
    timings: bool,
}

fn load_scenarios(config: Option<&Path>) -> Result<(Vec<Scenario>, Option<bayesbound::config::LoadedConfig>)> {
    match config {
        None => Ok((catalog(), None)),
        Some(p) => {
            let loaded = load_config(p)?;
            let mut sc = loaded.file.build_scenarios()?;
            if sc.is_empty() {
                sc = catalog();
            }
            Ok((sc, Some(loaded)))
        }
    }
}

fn build_plan(args: &RunArgs) -> Result<RunPlan> {
    let (mut scenarios, loaded) = load_scenarios(args.config.as_deref())?;
    if !args.scenario.is_empty() {
        for name in &args.scenario {
            if !scenarios.iter().any(|s| &s.name == name) {
                bail!("no scenario named '{name}'");
            }
        }
        scenarios.retain(|s| args.scenario.contains(&s.name));
    }
    let mut plan = RunPlan::new(scenarios);
    if let Some(l) = &loaded {
        let p = &l.file.plan;
        plan.config_hash = l.hash.clone();
        if let Some(b) = &p.bounds {
            plan.bounds = b.iter().map(|s| s.parse()).collect::<bayesbound::Result<_>>()?;
        }
        if let Some(v) = &p.lambdas {
            plan.lambdas = v.clone();
        }
        if let Some(g) = p.lambda_grid {
            plan.lambda_grid = g;
        }
        if let Some(t) = p.tol {
            plan.tol = t;
        }
        plan.depolarize = p.depolarize;
        plan.sweep = p.sweep.clone();
    }
    // Flags override the config file.
    if !args.bounds.is_empty() {
        plan.bounds = args.bounds.iter().map(|s| s.parse::<BoundKind>()).collect::<bayesbound::Result<_>>()?;
    }
    if !args.lambdas.is_empty() {
        plan.lambdas = args.lambdas.clone();
    }
    if let Some(g) = args.lambda_grid {
        plan.lambda_grid = g;
    }
    if let Some(t) = args.tol {
        plan.tol = t;
    }
    if args.depolarize.is_some() {
        plan.depolarize = args.depolarize;
    }
    plan.include_timings = args.timings;
    plan.validate()?;
    Ok(plan)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn dump_sdps(plan: &RunPlan, out: &Path) -> Result<()> {
    let dir = out.join("sdp");
    fs::create_dir_all(&dir)?;
    for s in &plan.scenarios {
        let model = match plan.depolarize {
            Some(eps) => s.model.depolarized(eps)?,
            None => s.model.clone(),
        };
        let avg = compute_averages(&model, &s.prior, &s.weight)?;
        let mut problems = Vec::new();
        if plan.bounds.contains(&BoundKind::Bnh) {
            problems.push(("bnh".to_string(), bnh_problem(&avg).map(|p| p.0)));
        }
        if plan.bounds.contains(&BoundKind::BhLambda) && s.weight.is_constant() {
            for &l in &plan.lambdas {
                problems.push((format!("bh_lambda_{l}"), bh_lambda_problem(&avg, l).map(|p| p.0)));
            }
        }
        if plan.bounds.contains(&BoundKind::BhThetadep) {
            problems.push((
                "bh_thetadep".to_string(),
                bh_thetadep_problem(&avg, &model, &s.prior, &s.weight).map(|p| p.0),
            ));
        }
        for (name, p) in problems {
            match p {
                Ok(p) => write(&dir.join(format!("{}_{name}.txt", s.name)), &p.dump())?,
                Err(e) => log::warn!("{}: cannot build {name}: {e}", s.name),
            }
        }
    }
    Ok(())
}

fn backend(name: &str) -> Result<Box<dyn SolverBackend>> {
    Ok(backend_by_name(name)?)
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let plan = build_plan(&args)?;
    let backend = backend(&args.backend)?;
    fs::create_dir_all(&args.out)?;
    if args.dump_sdp {
        dump_sdps(&plan, &args.out)?;
    }
    let rep = report::run(&plan, backend.as_ref())?;
    write(&args.out.join("report.json"), &report::to_json(&rep)?)?;
    write(&args.out.join("report.csv"), &report::report_csv(&rep))?;
    let mut ok = true;
    for s in &rep.scenarios {
        let (mut unsupported, mut failed) = (0, 0);
        for e in s.bounds.iter().filter_map(|b| b.error.as_ref()) {
            if e.kind == "UnsupportedWeight" {
                unsupported += 1;
            } else {
                failed += 1;
            }
        }
        let order = if s.ordering_passed() { "ordering ok" } else { "ORDERING VIOLATED" };
        println!(
            "{:<26} {:>2} bounds, {failed} failed, {unsupported} unsupported, {order}",
            s.name,
            s.bounds.len()
        );
        ok &= s.ordering_passed();
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_sweep(mut args: RunArgs, axis: Option<String>, values: Vec<f64>) -> Result<ExitCode> {
    let mut plan = build_plan(&args)?;
    if let Some(axis) = axis {
        plan.sweep = Some(match axis.as_str() {
            "lambda" => SweepAxis::Lambda(values),
            "prior_width" => SweepAxis::PriorWidth(values),
            "node_count" => SweepAxis::NodeCount(
                values
                    .iter()
                    .map(|v| if *v >= 1.0 && v.fract() == 0.0 { Ok(*v as usize) } else { bail!("node counts must be positive integers") })
                    .collect::<Result<_>>()?,
            ),
            other => bail!("unknown sweep axis '{other}'"),
        });
        plan.validate()?;
    }
    if plan.sweep.is_none() {
        bail!("no sweep axis: pass --axis/--values or set plan.sweep in the config");
    }
    let backend = backend(&args.backend)?;
    fs::create_dir_all(&args.out)?;
    if std::mem::take(&mut args.dump_sdp) {
        dump_sdps(&plan, &args.out)?;
    }
    let rep = report::sweep(&plan, backend.as_ref())?;
    write(&args.out.join("sweep.json"), &report::to_json(&rep)?)?;
    write(&args.out.join("sweep.csv"), &report::sweep_csv(&rep))?;
    println!("{} rows", rep.rows.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_catalog() -> ExitCode {
    for s in catalog() {
        println!(
            "{:<26} n={} d={} nodes={:<3} {}",
            s.name,
            s.model.n_params(),
            s.model.dim(),
            s.prior.len(),
            s.description
        );
    }
    ExitCode::SUCCESS
}

fn cmd_check(config: Option<PathBuf>, tol: f64, backend_name: &str, out: Option<PathBuf>) -> Result<ExitCode> {
    let (scenarios, _) = load_scenarios(config.as_deref())?;
    let backend = backend(backend_name)?;
    let items = run_checks(Some(scenarios), backend.as_ref(), tol);
    let mut ok = true;
    for i in &items {
        println!("[{}] {} {} (worst {:.3e})", if i.passed { "PASS" } else { "FAIL" }, i.id, i.name, i.worst);
        for d in &i.detail {
            println!("       {d}");
        }
        ok &= i.passed;
    }
    if let Some(dir) = out {
        fs::create_dir_all(&dir)?;
        write(&dir.join("check.json"), &report::to_json(&items)?)?;
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep { run, axis, values } => cmd_sweep(run, axis, values),
        Command::Catalog => Ok(cmd_catalog()),
        Command::Check { config, tol, backend, out } => cmd_check(config, tol, &backend, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
