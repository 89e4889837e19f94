use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::{json, Value};

use tspef::consys::{
    build_lap_polytope, build_q0_triplet, build_q1bar, build_q2bar, objective_on_w, triplet_cost_vector,
    ConstraintSystem, Family, Objective,
};
use tspef::instances::{parse_matrix, CostMatrix, TspInstance};
use tspef::lp::{enumerate_vertices, enumerate_vertices_by_pivoting, solve_with, SolveOptions, DEFAULT_BASIS_GUARD};
use tspef::projection::{fourier_motzkin, remove_redundant, DEFAULT_FM_ROW_GUARD};
use tspef::rational;
use tspef::verify::{self, TheoremReport};
use tspef::Error;

#[derive(Parser, Debug)]
#[command(name = "tspef", version, about = "Exact LP experiments on assignment-based TSP formulations")]
struct Cli {
    /// Emit JSON instead of a human-readable summary.
    #[arg(long, global = true)]
    json: bool,

    /// Write output to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SizeArgs {
    /// Instance file: {"n": int, "d": [[...]], optional "c": [[...]]}.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Number of cities, depot included.
    #[arg(long)]
    n: Option<usize>,
    /// Number of non-depot cities (n - 1).
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the H-representation of a polytope.
    Build {
        polytope: Polytope,
        #[command(flatten)]
        size: SizeArgs,
    },
    /// Solve one of the linear programs over an instance.
    Solve {
        problem: Problem,
        #[arg(long)]
        instance: PathBuf,
        /// Include the final simplex tableau.
        #[arg(long)]
        dump_tableau: bool,
    },
    /// Run a verification suite.
    Verify {
        suite: Suite,
        #[command(flatten)]
        size: SizeArgs,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Enumerate the vertices of a polytope.
    Vertices {
        polytope: Polytope,
        #[command(flatten)]
        size: SizeArgs,
        #[arg(long, value_enum, default_value_t = Method::Exhaustive)]
        method: Method,
        /// Refuse when more basis candidates than this would be examined.
        #[arg(long, default_value_t = DEFAULT_BASIS_GUARD)]
        max_bases: u64,
    },
    /// Project a polytope onto the assignment variables by elimination.
    Project {
        polytope: Polytope,
        #[command(flatten)]
        size: SizeArgs,
        #[arg(long, value_enum)]
        onto: Onto,
        #[arg(long, default_value_t = DEFAULT_FM_ROW_GUARD)]
        max_fm_rows: usize,
        /// Also drop rows implied by the others (one LP per row).
        #[arg(long)]
        lp_redundancy: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Polytope {
    #[value(name = "a_n")]
    An,
    Q1bar,
    Q0,
    Q2bar,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Problem {
    Lap,
    Lp0,
    Lp1,
    Lp2,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Suite {
    Lemma1,
    Lemma2,
    EquivLapLp1,
    EquivLp0Lp2,
    AppliedCosts,
    BoundStudy,
    Nonintegrality,
    Birkhoff,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Method {
    Exhaustive,
    Pivot,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Onto {
    W,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

struct Output {
    json: Value,
    text: String,
    pass: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let out = match &cli.command {
        Command::Build { polytope, size } => build(*polytope, size)?,
        Command::Solve { problem, instance, dump_tableau } => solve_cmd(*problem, instance, *dump_tableau)?,
        Command::Verify { suite, size, seed, trials } => verify_cmd(*suite, size, *seed, *trials)?,
        Command::Vertices { polytope, size, method, max_bases } => vertices(*polytope, size, *method, *max_bases)?,
        Command::Project { polytope, size, onto: Onto::W, max_fm_rows, lp_redundancy } => {
            project(*polytope, size, *max_fm_rows, *lp_redundancy)?
        }
    };
    let body = if cli.json {
        let mut s = serde_json::to_string_pretty(&out.json).expect("json");
        s.push('\n');
        s
    } else {
        out.text
    };
    match &cli.output {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        None => print!("{body}"),
    }
    if out.pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::Usage(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })
}

fn load_instance(path: &Path) -> CliResult<TspInstance> {
    TspInstance::from_json(&read_json(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// The `m x m` assignment costs stored under `"c"` in an instance file.
fn load_assignment_costs(path: &Path, m: usize) -> CliResult<CostMatrix> {
    let v = read_json(path)?;
    let c = v.get("c").ok_or_else(|| {
        Failure::Usage(format!("{}: assignment problems need an m x m cost matrix `c`", path.display()))
    })?;
    let c = parse_matrix(c, "c").map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if c.size() != m {
        return Err(Failure::Usage(format!("`c` is {0}x{0} but m = {m}", c.size())));
    }
    Ok(c)
}

/// Number of cities from `--n`, `--m` or the instance file.
fn resolve_n(size: &SizeArgs) -> CliResult<Option<usize>> {
    let from_file = size.instance.as_deref().map(load_instance).transpose()?.map(|i| i.n());
    let given = [size.n, size.m.map(|m| m + 1), from_file];
    let mut known = given.iter().flatten();
    let Some(&n) = known.next() else { return Ok(None) };
    if known.any(|&k| k != n) {
        return Err(Failure::Usage("--n, --m and --instance disagree on the size".into()));
    }
    Ok(Some(n))
}

fn require_n(size: &SizeArgs) -> CliResult<usize> {
    resolve_n(size)?.ok_or_else(|| Failure::Usage("give --n, --m or --instance".into()))
}

fn build_system(p: Polytope, n: usize) -> CliResult<ConstraintSystem> {
    let m = n.checked_sub(1).ok_or(Error::EmptyInstance)?;
    Ok(match p {
        Polytope::An => build_lap_polytope(m)?,
        Polytope::Q1bar => build_q1bar(n)?,
        Polytope::Q0 => build_q0_triplet(m)?,
        Polytope::Q2bar => build_q2bar(n)?,
    })
}

fn system_summary(name: &str, sys: &ConstraintSystem) -> String {
    format!(
        "{name}: {} variables (w {}, y {}, x {}), {} rows ({} equalities, {} inequalities), {} sign constraints\n",
        sys.var_count(),
        sys.count_family(Family::W),
        sys.count_family(Family::Y),
        sys.count_family(Family::X),
        sys.row_count(),
        sys.eq_row_count(),
        sys.le_row_count(),
        sys.nonneg().len()
    )
}

fn polytope_name(p: Polytope) -> &'static str {
    match p {
        Polytope::An => "a_n",
        Polytope::Q1bar => "q1bar",
        Polytope::Q0 => "q0",
        Polytope::Q2bar => "q2bar",
    }
}

fn build(p: Polytope, size: &SizeArgs) -> CliResult<Output> {
    let sys = build_system(p, require_n(size)?)?;
    Ok(Output { text: system_summary(polytope_name(p), &sys), json: sys.to_json(), pass: true })
}

fn solve_cmd(problem: Problem, path: &Path, dump_tableau: bool) -> CliResult<Output> {
    let inst = load_instance(path)?;
    let (n, m) = (inst.n(), inst.m());
    let (sys, obj): (ConstraintSystem, Objective) = match problem {
        Problem::Lap => (build_lap_polytope(m)?, objective_on_w(&load_assignment_costs(path, m)?)),
        Problem::Lp1 => (build_q1bar(n)?, objective_on_w(&load_assignment_costs(path, m)?)),
        Problem::Lp0 => (build_q0_triplet(m)?, triplet_cost_vector(&inst)?),
        Problem::Lp2 => (build_q2bar(n)?, triplet_cost_vector(&inst)?),
    };
    let sol = solve_with(&sys, &obj, SolveOptions { dump_tableau })?;
    sol.certify(&sys, &obj)?;
    let mut text = format!(
        "status: {}\nobjective: {}\npivots: {}\n",
        sol.status.as_str(),
        sol.objective_value.as_ref().map_or("-".into(), rational::format),
        sol.pivots
    );
    for (v, q) in sol.point.iter().filter(|(_, q)| !q.is_zero()) {
        text.push_str(&format!("  {v} = {}\n", rational::format(q)));
    }
    Ok(Output { json: sol.to_json(), text, pass: true })
}

fn verify_cmd(suite: Suite, size: &SizeArgs, seed: u64, trials: Option<usize>) -> CliResult<Output> {
    let instance = size.instance.as_deref().map(load_instance).transpose()?;
    let n = resolve_n(size)?;
    let report: TheoremReport = match suite {
        Suite::Lemma1 => match n {
            Some(n) => verify::verify_lemma1(&[n.saturating_sub(1)])?,
            None => verify::verify_lemma1(&[3, 4, 5])?,
        },
        Suite::Lemma2 => verify::verify_lemma2_counterexample()?,
        Suite::EquivLapLp1 => verify::verify_equivalence_lap_lp1(n.unwrap_or(5) - 1, trials.unwrap_or(50), seed)?,
        Suite::EquivLp0Lp2 => verify::verify_equivalence_lp0_lp2(n.unwrap_or(5), trials.unwrap_or(20), seed)?,
        Suite::AppliedCosts => match &instance {
            Some(inst) => verify::verify_applied_costs(inst)?,
            None => {
                let ns: Vec<usize> = n.map_or(vec![5, 6], |n| vec![n]);
                verify::verify_applied_costs_random(&ns, trials.unwrap_or(5), seed)?
            }
        },
        Suite::BoundStudy => match &instance {
            Some(inst) => verify::lp0_bound_study(inst)?,
            None => verify::lp0_bound_study_random(n.unwrap_or(5), trials.unwrap_or(20), seed)?,
        },
        Suite::Nonintegrality => verify::verify_nonintegrality()?,
        Suite::Birkhoff => match n {
            Some(n) => verify::verify_birkhoff(&[n.saturating_sub(1)])?,
            None => verify::verify_birkhoff(&[2, 3, 4])?,
        },
    };
    let mut text = report.summary();
    text.push('\n');
    if let Some(cx) = &report.counterexample {
        text.push_str(&format!("counterexample: {cx}\n"));
    }
    if let Some(rows) = report.details.get("instances").and_then(Value::as_array) {
        for r in rows {
            text.push_str(&format!("  lp0 {:>8}  tour {:>6}  gap {:>8}\n", r["lp0"].as_str().unwrap_or("?"), r["tour"].as_str().unwrap_or("?"), r["gap"].as_str().unwrap_or("?")));
        }
    }
    if let Some(point) = report.details.get("point").and_then(Value::as_object) {
        for (k, v) in point {
            text.push_str(&format!("  {k} = {}\n", v.as_str().unwrap_or("?")));
        }
    }
    Ok(Output { pass: report.pass(), json: report.to_json(), text })
}

fn vertices(p: Polytope, size: &SizeArgs, method: Method, guard: u64) -> CliResult<Output> {
    if guard == 0 {
        return Err(Failure::Usage("--max-bases must be positive".into()));
    }
    let sys = build_system(p, require_n(size)?)?;
    let vs = match method {
        Method::Exhaustive => enumerate_vertices(&sys, guard)?,
        Method::Pivot => enumerate_vertices_by_pivoting(&sys, guard)?,
    };
    let json = json!({
        "polytope": polytope_name(p),
        "vertices": vs.len(),
        "integral": vs.integral_count(),
        "bases_examined": vs.bases_examined,
        "points": vs.vertices.iter().map(|v| {
            Value::Object(vs.variables.iter().zip(&v.values)
                .filter(|(_, q)| !q.is_zero())
                .map(|(var, q)| (var.to_string(), Value::String(rational::format(q))))
                .collect())
        }).collect::<Vec<_>>(),
    });
    let text = format!(
        "{}: {} vertices, {} integral, {} fractional ({} bases examined)\n",
        polytope_name(p),
        vs.len(),
        vs.integral_count(),
        vs.len() - vs.integral_count(),
        vs.bases_examined
    );
    Ok(Output { json, text, pass: true })
}

fn project(p: Polytope, size: &SizeArgs, guard: usize, lp_redundancy: bool) -> CliResult<Output> {
    if guard == 0 {
        return Err(Failure::Usage("--max-fm-rows must be positive".into()));
    }
    let mut sys = build_system(p, require_n(size)?)?;
    for f in [Family::X, Family::Y] {
        sys = fourier_motzkin(&sys, f, guard)?;
    }
    if lp_redundancy {
        sys = remove_redundant(&sys)?;
    }
    Ok(Output { text: system_summary("projection", &sys), json: sys.to_json(), pass: true })
}
