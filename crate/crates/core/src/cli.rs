//! Command-line front end.
//!
//! Every subcommand writes one JSON document to `--report` (or stdout) and a
//! one-line summary to stderr. Exit codes: 0 success, 1 input or validation
//! error, 2 infeasible outcome, 3 an internal size or iteration guard fired.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::covers::{enumerate_covers, CoverError, CoverFamily, InducedCost};
use crate::exact::{exact_solve, gap_report, ExactError};
use crate::instance::{Instance, InstanceError, Problem};
use crate::lovasz::{check_submodular, LovaszError, SetFunction, MAX_CHECK_GROUND};
use crate::lp::LpError;
use crate::num::{Rational, Scalar};
use crate::oracle::SetCost;
use crate::relax::{solve_relaxation, solve_scpsc_relaxation, Arithmetic, RelaxConfig, RelaxError};
use crate::rounding::{solve_whp, RoundingError, RoundingParams, WhpConfig};
use crate::scpsc::{solve_scpsc_whp, ScpscError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pmcover", version, about = "Submodular cost partial multi-cover solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relax, round and report the best of several repetitions.
    Solve(SolveArgs),
    /// Solve the convex relaxation only.
    Relax(RelaxArgs),
    /// Brute-force optimum.
    Exact(InputArgs),
    /// Natural program, reformulated relaxation and exact optimum side by side.
    Gap(RelaxArgs),
    /// List the r_e-covers.
    Covers(InputArgs),
    /// Validate the instance and test the cost functions for submodularity.
    Check(InputArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Instance JSON file.
    pub input: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Worker threads for enumeration and repetitions.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct RelaxArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Cutting-plane stopping tolerance.
    #[arg(long, default_value_t = crate::relax::DEFAULT_TOL)]
    pub tol: f64,
    /// Use floating-point arithmetic even for rational data.
    #[arg(long)]
    pub float: bool,
    /// Unit-requirement pipeline over set variables.
    #[arg(long)]
    pub scpsc: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub relax: RelaxArgs,
    /// Coverage slack as a decimal or fraction; defaults to q/20.
    #[arg(long)]
    pub epsilon: Option<Rational>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Repetitions; defaults to ⌈4·ln(max(n,2))⌉.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Defaults to 1/q.
    #[arg(long)]
    pub s: Option<f64>,
    /// Defaults to 1/√q.
    #[arg(long)]
    pub t: Option<f64>,
    /// Override the phase-2 iteration count.
    #[arg(long)]
    pub iterations: Option<u32>,
    /// Target qP instead of (q−ε)P.
    #[arg(long)]
    pub expectation_mode: bool,
    /// Include every θ draw of every repetition in the report.
    #[arg(long)]
    pub theta_trace: bool,
}

/// A failure mapped to an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: EXIT_INPUT, message: message.to_string() }
    }

    fn guard(message: impl ToString) -> Self {
        Failure { code: EXIT_GUARD, message: message.to_string() }
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        Failure::input(e)
    }
}

impl From<CoverError> for Failure {
    fn from(e: CoverError) -> Self {
        match e {
            CoverError::TooMany { .. } => Failure::guard(e),
            CoverError::BadIndex { .. } => Failure::input(e),
        }
    }
}

impl From<RelaxError> for Failure {
    fn from(e: RelaxError) -> Self {
        match e {
            RelaxError::NotUnitRequirement => Failure::input(e),
            _ => Failure::guard(e),
        }
    }
}

impl From<RoundingError> for Failure {
    fn from(e: RoundingError) -> Self {
        match e {
            RoundingError::AllInfeasible { .. } => Failure { code: EXIT_INFEASIBLE, message: e.to_string() },
            RoundingError::BadParams(_) => Failure::input(e),
            _ => Failure::guard(e),
        }
    }
}

impl From<ScpscError> for Failure {
    fn from(e: ScpscError) -> Self {
        match e {
            ScpscError::NotUnitRequirement => Failure::input(e),
            ScpscError::GuardExceeded { .. } => Failure::guard(e),
            ScpscError::Rounding(r) => r.into(),
        }
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::NotLinear(_) => Failure::input(e),
            ExactError::NoFeasible => Failure { code: EXIT_INFEASIBLE, message: e.to_string() },
            ExactError::Covers(c) => c.into(),
            ExactError::Relax(r) => r.into(),
            _ => Failure::guard(e),
        }
    }
}

impl From<LovaszError> for Failure {
    fn from(e: LovaszError) -> Self {
        Failure::guard(e)
    }
}

impl From<LpError> for Failure {
    fn from(e: LpError) -> Self {
        Failure::guard(e)
    }
}

/// Reads and parses an instance file; validation is left to [`Problem`].
pub fn load_instance(path: &Path) -> Result<Instance, InstanceError> {
    let text = fs::read_to_string(path)
        .map_err(|source| InstanceError::Io { path: path.display().to_string(), source })?;
    Instance::from_json(&text)
}

fn load_problem(path: &Path) -> Result<Problem, Failure> {
    Ok(Problem::new(load_instance(path)?)?)
}

fn relax_config(args: &RelaxArgs) -> Result<RelaxConfig, Failure> {
    if !(args.tol.is_finite() && args.tol >= 0.0) {
        return Err(Failure::input(format!("--tol must be a nonnegative number, got {}", args.tol)));
    }
    let arithmetic = if args.float { Arithmetic::Float } else { Arithmetic::Auto };
    Ok(RelaxConfig { tol: args.tol, arithmetic, max_cuts: None })
}

struct Output {
    report: Value,
    summary: String,
    code: i32,
}

fn emit(path: Option<&Path>, report: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Parses `argv` (including the program name), runs, returns the exit code.
pub fn run<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("PMCOVER_LOG", "warn")).try_init();
    let (input, threads) = match &cli.command {
        Command::Solve(a) => (&a.relax.input, a.relax.input.threads),
        Command::Relax(a) | Command::Gap(a) => (&a.input, a.input.threads),
        Command::Exact(a) | Command::Covers(a) | Command::Check(a) => (a, a.threads),
    };
    let report_path = input.report.clone();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_INPUT;
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Relax(a) => cmd_relax(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Gap(a) => cmd_gap(a),
        Command::Covers(a) => cmd_covers(a),
        Command::Check(a) => cmd_check(a),
    });
    match result.and_then(|out| emit(report_path.as_deref(), &out.report).map(|_| out)) {
        Ok(out) => {
            eprintln!("{}", out.summary);
            out.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<Output, Failure> {
    let problem = load_problem(&args.relax.input.input)?;
    let config = relax_config(&args.relax)?;
    let scpsc = args.relax.scpsc;
    if !scpsc && !problem.oracle().is_monotone() {
        return Err(Failure::input("cost is not monotone; only the --scpsc pipeline accepts it"));
    }
    let defaults = RoundingParams::defaults(problem.q());
    let params = RoundingParams {
        s: args.s.unwrap_or(defaults.s),
        t: args.t.unwrap_or(defaults.t),
        epsilon: args.epsilon.clone().unwrap_or(defaults.epsilon),
        iterations: args.iterations,
        expectation_mode: args.expectation_mode,
        seed: args.seed,
    };
    params.validate(problem.q())?;
    let whp = WhpConfig { reps: args.reps, threads: args.relax.input.threads };

    let (frac, report, closure) = if scpsc {
        let frac = solve_scpsc_relaxation(&problem, &config)?;
        let (report, run) = solve_scpsc_whp(&problem, &frac, &params, &whp)?;
        let closure = json!({
            "cost": run.closure_cost,
            "bound": run.closure_bound,
            "within_bound": run.closure_within_bound,
        });
        (frac, report, Some(closure))
    } else {
        let family = enumerate_covers(&problem)?;
        let frac = solve_relaxation(&problem, &family, &config)?;
        let report = solve_whp(&problem, &family, &frac, &params, &whp)?;
        (frac, report, None)
    };

    let best = &report.best;
    let total = problem.total_profit();
    let ratio = if frac.value > 0.0 { Some(best.cost.to_f64() / frac.value) } else { None };
    let mut out = json!({
        "command": "solve",
        "pipeline": if scpsc { "scpsc" } else { "scpmc" },
        "feasible": best.feasible,
        "cost": best.cost,
        "covered_profit": best.covered_profit,
        "total_profit": total,
        "target_profit": params.target(problem.q(), total),
        "q": problem.q(),
        "epsilon": params.epsilon,
        "s": params.s,
        "t": params.t,
        "seed": params.seed,
        "expectation_mode": params.expectation_mode,
        "S_prime": best.s_prime,
        "S1": best.s1,
        "S2": best.s2,
        "opt_cp": frac.value,
        "opt_cp_lower_bound": frac.lower_bound,
        "ratio_vs_relaxation": ratio,
        "repetitions_used": report.reps.len(),
        "best_repetition": report.best_rep,
        "best": to_value(best),
        "bounds": to_value(&report.bounds),
        "repetitions": to_value(&report.reps),
        "warning": report.warning,
        "relaxation": to_value(&frac.diagnostics),
    });
    if let Some(c) = closure {
        out["closure"] = c;
    }
    if args.theta_trace {
        out["theta_traces"] = Value::Array(report.outcomes.iter().map(|o| to_value(&o.thetas)).collect());
    }
    let code = if best.feasible { EXIT_OK } else { EXIT_INFEASIBLE };
    let summary = format!(
        "solve: cost {} covering {}/{} profit with {} sets (opt_cp {:.6}, rep {} of {})",
        best.cost,
        best.covered_profit,
        total,
        best.s_prime.len(),
        frac.value,
        report.best_rep,
        report.reps.len()
    );
    Ok(Output { report: out, summary, code })
}

fn cmd_relax(args: &RelaxArgs) -> Result<Output, Failure> {
    let problem = load_problem(&args.input.input)?;
    let config = relax_config(args)?;
    let (frac, labels): (_, Vec<Value>) = if args.scpsc {
        let frac = solve_scpsc_relaxation(&problem, &config)?;
        let labels = (0..problem.num_sets()).map(|i| json!([problem.set_id(i)])).collect();
        (frac, labels)
    } else {
        let family = enumerate_covers(&problem)?;
        let frac = solve_relaxation(&problem, &family, &config)?;
        let labels = family.covers().iter().map(|c| json!(c.sets.iter().map(|&s| problem.set_id(s)).collect::<Vec<_>>())).collect();
        (frac, labels)
    };
    let x: Vec<Value> = labels.into_iter().zip(&frac.x).map(|(sets, v)| json!({"sets": sets, "value": v})).collect();
    let y: serde_json::Map<String, Value> =
        (0..problem.num_elements()).map(|e| (problem.element_id(e).to_string(), json!(frac.y[e]))).collect();
    let report = json!({
        "command": "relax",
        "pipeline": if args.scpsc { "scpsc" } else { "scpmc" },
        "value": frac.value,
        "value_exact": frac.value_exact,
        "lower_bound": frac.lower_bound,
        "x": x,
        "y": y,
        "cuts": frac.diagnostics.cuts,
        "iterations": frac.diagnostics.lp_solves,
        "diagnostics": to_value(&frac.diagnostics),
    });
    let summary = format!("relax: value {:.9} after {} cuts", frac.value, frac.diagnostics.cuts);
    Ok(Output { report, summary, code: EXIT_OK })
}

fn cmd_exact(args: &InputArgs) -> Result<Output, Failure> {
    let problem = load_problem(&args.input)?;
    let res = exact_solve(&problem)?;
    let summary = format!(
        "exact: optimum {} with {:?} ({} of {} sub-collections feasible)",
        res.optimum, res.subcollection, res.feasible_count, res.enumerated
    );
    let mut report = to_value(&res);
    report["command"] = json!("exact");
    Ok(Output { report, summary, code: EXIT_OK })
}

fn cmd_gap(args: &RelaxArgs) -> Result<Output, Failure> {
    let problem = load_problem(&args.input.input)?;
    let gap = gap_report(&problem, &relax_config(args)?)?;
    let summary = format!(
        "gap: natural {} / reformulated {:.6} / exact {}",
        gap.natural_lp, gap.reformulated_relaxation, gap.exact
    );
    let mut report = to_value(&gap);
    report["command"] = json!("gap");
    Ok(Output { report, summary, code: EXIT_OK })
}

fn cmd_covers(args: &InputArgs) -> Result<Output, Failure> {
    let problem = load_problem(&args.input)?;
    let family = enumerate_covers(&problem)?;
    let report = covers_report(&problem, &family);
    let summary = format!("covers: {} r_e-covers", family.len());
    Ok(Output { report, summary, code: EXIT_OK })
}

fn covers_report(problem: &Problem, family: &CoverFamily) -> Value {
    let names = |c: usize| -> Vec<&str> { family.cover(c).sets.iter().map(|&s| problem.set_id(s)).collect() };
    let per_element: serde_json::Map<String, Value> = (0..problem.num_elements())
        .map(|e| {
            let list: Vec<_> = family.element_covers(e).iter().map(|&c| names(c)).collect();
            (problem.element_id(e).to_string(), json!(list))
        })
        .collect();
    let stats = problem.frequency_stats();
    json!({
        "command": "covers",
        "count": family.len(),
        "f": stats.f,
        "b": stats.b,
        "covers": (0..family.len()).map(names).collect::<Vec<_>>(),
        "by_element": per_element,
    })
}

fn submodularity_value<T: Scalar + Serialize, F: SetFunction<T>>(f: &F) -> Result<Value, Failure> {
    if f.ground_size() > MAX_CHECK_GROUND {
        return Ok(json!({"checked": false, "ground_size": f.ground_size()}));
    }
    let rep = check_submodular(f)?;
    let mut v = to_value(&rep);
    v["checked"] = json!(true);
    v["submodular"] = json!(rep.is_submodular());
    Ok(v)
}

fn cmd_check(args: &InputArgs) -> Result<Output, Failure> {
    let instance = load_instance(&args.input)?;
    let validation = instance.validate();
    if !validation.is_valid() {
        let report = json!({"command": "check", "valid": false, "validation": to_value(&validation)});
        let summary = format!("check: invalid instance ({} violations)", validation.violations.len());
        return Ok(Output { report, summary, code: EXIT_INPUT });
    }
    let problem = Problem::new(instance)?;
    let family = enumerate_covers(&problem)?;
    let oracle = problem.oracle();
    let induced = InducedCost::new(oracle, &family);
    let (base, induced_v) = if oracle.is_exact() {
        (submodularity_value::<Rational, _>(&SetCost::new(oracle))?, submodularity_value::<Rational, _>(&induced)?)
    } else {
        (submodularity_value::<f64, _>(&SetCost::new(oracle))?, submodularity_value::<f64, _>(&induced)?)
    };
    let induced_ok = induced_v["submodular"].as_bool();
    let stats = problem.frequency_stats();
    let report = json!({
        "command": "check",
        "valid": true,
        "validation": to_value(&validation),
        "cost_kind": oracle.kind_name(),
        "declared_monotone": oracle.is_monotone(),
        "unit_requirement": problem.is_unit_requirement(),
        "f": stats.f,
        "b": stats.b,
        "cover_count": family.len(),
        "base_cost": base,
        "induced_cost": induced_v,
    });
    let summary = match induced_ok {
        Some(true) => "check: valid; induced cost is submodular".to_string(),
        Some(false) => "check: valid; induced cost is NOT submodular".to_string(),
        None => "check: valid; induced cost too large to check".to_string(),
    };
    Ok(Output { report, summary, code: EXIT_OK })
}
