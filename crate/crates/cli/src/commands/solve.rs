use std::path::PathBuf;

use clap::{Args, ValueEnum};
use gdam::problems::{load_qp, AnalyticProblem, CecId, CecProblem, NonconvexProblem, QpProblem};
use gdam::{accelerated_solve, vanilla_solve, BarrierProblem, Problem, SolveResult, SolverConfig, Vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{parse_point, Coords, SolverFlags};
use crate::error::{CliError, CliResult};
use crate::manifest::Run;
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Vanilla,
    Accelerated,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Shipped problem: analytic, nonconvex, G01, G04, G06, G08 or G24.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    pub problem: Option<String>,
    /// QP in the text format read by `gdam::problems::load_qp`.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "vanilla")]
    pub algorithm: Algorithm,
    /// Start point, comma separated. Defaults: a fixed interior point for the
    /// 2-D problems, a seeded random interior point for the CEC problems and
    /// the box-and-equality heuristic for QPs.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub x0: Option<Coords>,
    /// Seed for the random CEC start; defaults to the seed the `cec` bench
    /// suite uses for the problem.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

pub enum Loaded {
    Analytic,
    Nonconvex,
    Cec(CecProblem),
    Qp(QpProblem),
}

impl Loaded {
    pub fn problem(&self) -> &dyn Problem {
        match self {
            Loaded::Analytic => &AnalyticProblem,
            Loaded::Nonconvex => &NonconvexProblem,
            Loaded::Cec(p) => p,
            Loaded::Qp(p) => p,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Loaded::Analytic => "analytic".into(),
            Loaded::Nonconvex => "nonconvex".into(),
            Loaded::Cec(p) => p.id.to_string(),
            Loaded::Qp(_) => "qp".into(),
        }
    }

    pub fn default_start(&self, seed: u64) -> CliResult<Vector> {
        Ok(match self {
            Loaded::Analytic => Vector::from_vec(vec![5.0, 20.0]),
            Loaded::Nonconvex => Vector::from_vec(vec![2.0, 3.0]),
            Loaded::Cec(p) => p.sample_start(&mut ChaCha8Rng::seed_from_u64(seed), 0.05, 10_000_000)?,
            Loaded::Qp(p) => p.feasible_start()?,
        })
    }

    /// Published reference settings for CEC problems.
    pub fn base_config(&self) -> SolverConfig {
        match self {
            Loaded::Cec(p) => {
                let row = p.id.reference_settings();
                SolverConfig {
                    zeta: row.zeta,
                    beta: row.beta,
                    max_iters: 200_000,
                    ..SolverConfig::default()
                }
            }
            _ => SolverConfig {
                max_iters: 200_000,
                ..SolverConfig::default()
            },
        }
    }
}

pub fn builtin(id: &str) -> CliResult<Loaded> {
    Ok(match id.to_ascii_lowercase().as_str() {
        "analytic" => Loaded::Analytic,
        "nonconvex" => Loaded::Nonconvex,
        _ => Loaded::Cec(CecProblem::new(id.parse::<CecId>()?)),
    })
}

#[derive(Debug, Serialize)]
struct SolveReport<'a> {
    problem: String,
    algorithm: Algorithm,
    x0: Vec<f64>,
    reference: Option<f64>,
    objective_error: Option<f64>,
    result: &'a SolveResult,
}

pub fn solve(problem: &dyn Problem, algorithm: Algorithm, cfg: &SolverConfig, x0: &Vector) -> CliResult<SolveResult> {
    if x0.len() != Problem::dim(problem) {
        return Err(CliError::Usage(format!(
            "start point has {} coordinates, problem has {}",
            x0.len(),
            Problem::dim(problem)
        )));
    }
    Ok(match algorithm {
        Algorithm::Vanilla => vanilla_solve(problem, cfg, x0)?,
        Algorithm::Accelerated => accelerated_solve(problem, cfg, x0)?,
    })
}

pub fn run(ctx: &Ctx, args: &SolveArgs) -> CliResult<()> {
    let mut run = Run::new("solve", &ctx.argv, &ctx.out)?;
    let loaded = match (&args.problem, &args.file) {
        (Some(id), _) => builtin(id)?,
        (None, Some(path)) => Loaded::Qp(load_qp(&run.read_input(path)?)?),
        (None, None) => return Err(CliError::Usage("need --problem or --file".into())),
    };
    let cfg = args.solver.resolve(loaded.base_config())?;
    run.config(&cfg)?;
    let x0 = match &args.x0 {
        Some(c) => Vector::from_vec(c.0.clone()),
        None => {
            let seed = match &loaded {
                Loaded::Cec(p) => {
                    let seed = args.seed.unwrap_or_else(|| crate::commands::bench::cec_seed(p.id));
                    run.seed(seed);
                    seed
                }
                _ => 0,
            };
            loaded.default_start(seed)?
        }
    };
    let problem = loaded.problem();
    let t = std::time::Instant::now();
    let out = solve(problem, args.algorithm, &cfg, &x0)?;
    run.time("solve", t.elapsed().as_secs_f64());
    let reference = BarrierProblem::reference_optimum(problem);
    let report = SolveReport {
        problem: loaded.name(),
        algorithm: args.algorithm,
        x0: x0.iter().copied().collect(),
        reference,
        objective_error: reference.map(|r| out.objective_error(r)),
        result: &out,
    };
    run.write_json("result.json", &report)?;
    run.finish()?;
    print!(
        "{}: {:?} after {} iterations, f = {:.10e}",
        report.problem, out.termination, out.iterations, out.objective
    );
    match report.objective_error {
        Some(e) => println!(", objective error {e:.3e}"),
        None => println!(),
    }
    Ok(())
}
