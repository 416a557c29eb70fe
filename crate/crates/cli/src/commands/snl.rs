use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Subcommand};
use gdam::snl::{
    generate_instance, load_instance, localize, write_instance, GenerateOptions, LocalizationResult, LocalizationStatus,
    Point, SnlConfig, SnlInstance,
};
use serde::Deserialize;

use crate::config::{overlay_file, SolverFlags};
use crate::error::{CliError, CliResult};
use crate::manifest::Run;
use crate::svg::Plot;
use crate::Ctx;

#[derive(Debug, Subcommand)]
pub enum SnlCommand {
    /// Generate a random instance on the unit square.
    Gen(GenArgs),
    /// Localize the sensors of an instance.
    Solve(SnlSolveArgs),
    /// Scatter plot of true, SDP and refined positions.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    /// Communication radius.
    #[arg(long, short)]
    pub r: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub anchors: usize,
    /// Multiplicative noise level on distances.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
}

#[derive(Debug, Args)]
pub struct SnlSolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// `localization.json` written by `gdam snl solve`.
    #[arg(long)]
    pub result: PathBuf,
}

pub fn run(ctx: &Ctx, cmd: &SnlCommand) -> CliResult<()> {
    match cmd {
        SnlCommand::Gen(a) => gen(ctx, a),
        SnlCommand::Solve(a) => solve(ctx, a),
        SnlCommand::Plot(a) => plot(ctx, a),
    }
}

fn gen(ctx: &Ctx, args: &GenArgs) -> CliResult<()> {
    let mut run = Run::new("snl gen", &ctx.argv, &ctx.out)?;
    let opts = GenerateOptions {
        n_anchors: args.anchors,
        noise: args.noise,
        ..GenerateOptions::new(args.n, args.r, args.seed)
    };
    run.config(&opts)?;
    run.seed(args.seed);
    let g = generate_instance(&opts)?;
    run.write("instance.txt", &write_instance(&g.instance))?;
    run.finish()?;
    println!(
        "n {} with {} sensor-sensor and {} anchor-sensor edges",
        g.instance.n,
        g.instance.edges_ss.len(),
        g.instance.edges_sa.len()
    );
    if let Some(w) = g.warning {
        eprintln!("warning: {} sensors have no path to an anchor", w.unanchored.len());
    }
    Ok(())
}

pub fn resolve_snl_config(flags: &SolverFlags) -> CliResult<SnlConfig> {
    let mut cfg = overlay_file(SnlConfig::default(), flags.config.as_deref())?;
    flags.apply(&mut cfg.solver);
    cfg.solver.validate()?;
    Ok(cfg)
}

fn solve(ctx: &Ctx, args: &SnlSolveArgs) -> CliResult<()> {
    let mut run = Run::new("snl solve", &ctx.argv, &ctx.out)?;
    let inst = load_instance(&run.read_input(&args.instance)?)?;
    let cfg = resolve_snl_config(&args.solver)?;
    run.config(&cfg)?;
    let res = localize(&inst, &cfg)?;
    run.time("localize", res.runtime_secs);
    run.write_json("localization.json", &result_json(&res)?)?;
    run.write("positions.csv", &positions_csv(&inst, &res))?;
    run.finish()?;
    match &res.status {
        LocalizationStatus::Solved => println!(
            "solved in {} iterations: rmsd sdp {}, refined {}, rank proxy {}",
            res.iterations,
            fmt_opt(res.rmsd_sdp),
            fmt_opt(res.rmsd_refined),
            fmt_opt(res.rank_proxy)
        ),
        LocalizationStatus::NotLocalizable { unanchored } => {
            println!("not localizable: {} sensors have no path to an anchor", unanchored.len())
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "n/a".into())
}

/// The result without its wall-clock time, which goes to the manifest.
pub fn result_json(res: &LocalizationResult) -> CliResult<serde_json::Value> {
    let mut v = serde_json::to_value(res)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("runtime_secs");
    }
    Ok(v)
}

fn positions_csv(inst: &SnlInstance, res: &LocalizationResult) -> String {
    let mut s = String::from("j,x_true,y_true,x_sdp,y_sdp,x_refined,y_refined\n");
    for j in 0..res.positions.len().max(res.refined.len()) {
        let t = inst.sensors.as_ref().and_then(|v| v.get(j));
        let cell = |p: Option<&Point>, k: usize| p.map(|p| p[k].to_string()).unwrap_or_default();
        let (a, b) = (res.positions.get(j), res.refined.get(j));
        let _ = writeln!(
            s,
            "{j},{},{},{},{},{},{}",
            cell(t, 0),
            cell(t, 1),
            cell(a, 0),
            cell(a, 1),
            cell(b, 0),
            cell(b, 1)
        );
    }
    s
}

#[derive(Deserialize)]
struct PlotInput {
    positions: Vec<Point>,
    refined: Vec<Point>,
}

fn plot(ctx: &Ctx, args: &PlotArgs) -> CliResult<()> {
    let mut run = Run::new("snl plot", &ctx.argv, &ctx.out)?;
    let inst = load_instance(&run.read_input(&args.instance)?)?;
    let text = run.read_input(&args.result)?;
    let res: PlotInput =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", args.result.display())))?;
    let truth = inst.sensors.clone().unwrap_or_default();
    let all: Vec<Point> = truth
        .iter()
        .chain(&res.positions)
        .chain(&res.refined)
        .chain(&inst.anchors)
        .copied()
        .collect();
    let mut plot = Plot::fitting(all.iter());
    // error bars from the truth to the SDP estimate
    if truth.len() == res.positions.len() {
        let bars: Vec<[Point; 2]> = truth.iter().zip(&res.positions).map(|(a, b)| [*a, *b]).collect();
        plot.segments(&bars, "#e0a0a0", 0.6, None);
    }
    plot.circles(&truth, 3.5, "#999999", Some("true positions"));
    plot.circles(&res.positions, 2.0, "#cc2222", Some("SDP estimates"));
    plot.circles(&res.refined, 1.5, "#1f4fbf", Some("refined estimates"));
    plot.squares(&inst.anchors, 8.0, "#000000", Some("anchors"));
    let title = format!("sensor localization, n = {}, r = {}", inst.n, inst.radius);
    run.write("snl.svg", &plot.render(&title, ctx.stamp()))?;
    run.finish()?;
    Ok(())
}
