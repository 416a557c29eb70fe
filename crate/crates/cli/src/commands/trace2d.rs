use std::fmt::Write as _;

use clap::{Args, ValueEnum};
use gdam::problems::{AnalyticProblem, AnalyticTrajectory, NonconvexProblem};
use gdam::solver::TrajectoryPoint;
use gdam::{vanilla_solve, BarrierProblem, Problem, SolverConfig, Termination, Vector};
use serde::Serialize;

use crate::config::{parse_point, Coords, SolverFlags};
use crate::error::{CliError, CliResult};
use crate::manifest::Run;
use crate::svg::{contour, Plot, Pt};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem2d {
    Analytic,
    Nonconvex,
}

#[derive(Debug, Args)]
pub struct Trace2dArgs {
    #[arg(long, value_enum, default_value = "analytic")]
    pub problem: Problem2d,
    /// Start point `x1,x2`; defaults to (30, 0) for the analytic problem and
    /// (2, 3) for the nonconvex one.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub x0: Option<Coords>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

/// How the run ended, in the terms used for 2-D pictures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    BoundaryKkt,
    InteriorCritical,
    Unfinished,
}

impl Classification {
    pub fn of(t: Termination) -> Self {
        match t {
            Termination::BoundaryReachedStepFloor | Termination::BoundaryReachedNoLineSearch => Self::BoundaryKkt,
            Termination::StationaryObjective => Self::InteriorCritical,
            Termination::MaxIters => Self::Unfinished,
        }
    }
}

#[derive(Debug, Serialize)]
struct Summary {
    problem: Problem2d,
    x0: Vec<f64>,
    x_final: Vec<f64>,
    objective: f64,
    termination: Termination,
    classification: Classification,
    iterations: usize,
    /// Largest `|defect|` against the closed-form curve (analytic only).
    max_defect: Option<f64>,
    defect_limit: Option<f64>,
}

pub fn run(ctx: &Ctx, args: &Trace2dArgs) -> CliResult<()> {
    let x0 = args.x0.clone().map(|c| c.0).unwrap_or_else(|| match args.problem {
        Problem2d::Analytic => vec![30.0, 0.0],
        Problem2d::Nonconvex => vec![2.0, 3.0],
    });
    if x0.len() != 2 {
        return Err(CliError::Usage(format!("--x0 needs two coordinates, got {}", x0.len())));
    }
    let base = SolverConfig {
        zeta: 0.95,
        beta: 1e-2,
        max_iters: 200_000,
        record_trajectory: true,
        trajectory_stride: Some(1),
        exterior_start: true,
        ..SolverConfig::default()
    };
    let cfg = args.solver.resolve(base)?;
    let mut run = Run::new("trace2d", &ctx.argv, &ctx.out)?;
    run.config(&cfg)?;

    let problem: &dyn Problem = match args.problem {
        Problem2d::Analytic => &AnalyticProblem,
        Problem2d::Nonconvex => &NonconvexProblem,
    };
    let t = std::time::Instant::now();
    let out = vanilla_solve(problem, &cfg, &Vector::from_vec(x0.clone()))?;
    run.time("solve", t.elapsed().as_secs_f64());
    let traj = out.trajectory.clone().unwrap_or_default();

    let curve = match args.problem {
        Problem2d::Analytic if x0[0] != 0.0 => Some(AnalyticTrajectory::new(cfg.zeta, [x0[0], x0[1]])?),
        _ => None,
    };
    let max_defect = curve.map(|c| {
        traj.iter()
            .map(|p| c.defect([p.x[0], p.x[1]]).abs())
            .fold(0.0, f64::max)
    });
    let summary = Summary {
        problem: args.problem,
        x0: x0.clone(),
        x_final: out.x.iter().copied().collect(),
        objective: out.objective,
        termination: out.termination,
        classification: Classification::of(out.termination),
        iterations: out.iterations,
        max_defect,
        defect_limit: max_defect.map(|_| 50.0 * cfg.beta),
    };

    run.write("trace.csv", &trajectory_csv(&traj))?;
    let svg = render(problem, args.problem, &traj, curve.as_ref(), cfg.zeta);
    run.write("trace.svg", &svg.render(&format!("{:?} problem, zeta = {}", args.problem, cfg.zeta), ctx.stamp()))?;
    run.write_json("summary.json", &summary)?;
    run.finish()?;

    println!(
        "{:?}: {:?} after {} iterations at ({:.6}, {:.6}), f = {:.6}",
        args.problem, summary.classification, out.iterations, out.x[0], out.x[1], out.objective
    );
    if let (Some(d), Some(l)) = (max_defect, summary.defect_limit) {
        println!("max trajectory defect {d:.3e} (50 beta = {l:.3e})");
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn trajectory_csv(traj: &[TrajectoryPoint]) -> String {
    let mut s = String::from("k,x1,x2,f,g,cos_theta,eps,beta\n");
    for p in traj {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            p.k,
            p.x[0],
            p.x[1],
            p.f,
            opt(p.max_g),
            opt(p.cos_theta),
            opt(p.residual),
            p.beta
        );
    }
    s
}

fn render(
    problem: &dyn Problem,
    which: Problem2d,
    traj: &[TrajectoryPoint],
    curve: Option<&AnalyticTrajectory>,
    zeta: f64,
) -> Plot {
    let mut pts: Vec<Pt> = traj.iter().map(|p| [p.x[0], p.x[1]]).collect();
    let anchor_pts: Vec<Pt> = match which {
        Problem2d::Analytic => vec![AnalyticProblem::KKT_POINT, [0.0, 0.0]],
        Problem2d::Nonconvex => NonconvexProblem::critical_points().to_vec(),
    };
    pts.extend(anchor_pts.iter().copied());
    let mut plot = Plot::fitting(pts.iter());
    let (lo, hi) = plot.bounds();

    let f = |p: Pt| BarrierProblem::objective(problem, &Vector::from_vec(p.to_vec()));
    let g = |p: Pt| problem.constraint(0, &Vector::from_vec(p.to_vec()));
    // contour levels at grid quantiles of f
    let mut samples: Vec<f64> = (0..=20)
        .flat_map(|i| {
            (0..=20).map(move |j| [lo[0] + (hi[0] - lo[0]) * i as f64 / 20.0, lo[1] + (hi[1] - lo[1]) * j as f64 / 20.0])
        })
        .map(f)
        .collect();
    samples.sort_by(f64::total_cmp);
    let mut first = true;
    for q in 1..10 {
        let level = samples[q * samples.len() / 10];
        let segs = contour(&f, lo, hi, 120, level);
        plot.segments(&segs, "#bbbbbb", 0.8, first.then_some("objective contours"));
        first = false;
    }
    plot.segments(&contour(&g, lo, hi, 200, 0.0), "#cc2222", 1.5, Some("constraint g = 0"));
    if let Some(c) = curve {
        let x1_0 = c.x0[0];
        let curve_pts: Vec<Pt> = (0..=400)
            .map(|i| {
                let x1 = x1_0 * (1.0 - i as f64 / 400.0).max(1e-6);
                [x1, c.x2_at(x1)]
            })
            .filter(|p| p[1] >= lo[1] && p[1] <= hi[1])
            .collect();
        plot.polyline(&curve_pts, "#22aa22", 1.2, Some(&format!("closed-form curve, zeta {zeta}")));
    }
    let path: Vec<Pt> = traj.iter().map(|p| [p.x[0], p.x[1]]).collect();
    plot.polyline(&path, "#1f4fbf", 1.2, Some("trajectory"));
    if let (Some(a), Some(b)) = (path.first(), path.last()) {
        plot.circles(&[*a], 4.0, "#1f4fbf", None);
        plot.squares(&[*b], 8.0, "#000000", Some("end point"));
    }
    plot.circles(&anchor_pts, 2.5, "#888888", None);
    plot
}
