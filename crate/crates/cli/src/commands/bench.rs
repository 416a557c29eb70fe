use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, ValueEnum};
use gdam::problems::{planted_qp, AnalyticProblem, AnalyticTrajectory, CecId, CecProblem};
use gdam::snl::{generate_instance, localize, GenerateOptions, SnlConfig};
use gdam::{accelerated_solve, vanilla_solve, SolverConfig, Vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::manifest::Run;
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Analytic,
    Cec,
    Qp,
    SnlSmall,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Analytic => "analytic",
            Suite::Cec => "cec",
            Suite::Qp => "qp",
            Suite::SnlSmall => "snl-small",
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// One benchmark case, run in isolation on a worker thread.
#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub id: usize,
    pub problem: String,
    pub config: String,
    #[serde(skip)]
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Analytic { zeta: f64, beta: f64 },
    Cec { id: CecId, seed: u64 },
    Qp { n: usize, p: usize, seed: u64 },
    Snl { n: usize, r: f64, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub id: usize,
    pub problem: String,
    pub config: String,
    pub iterations: usize,
    /// Objective value, or refined RMSD for SNL.
    pub value: f64,
    pub reference: Option<f64>,
    pub error: f64,
    pub threshold: f64,
    pub pass: bool,
    pub note: String,
    #[serde(skip)]
    pub secs: f64,
}

/// Seeds of the random interior starts, one per CEC problem.
pub const CEC_SEEDS: [(CecId, u64); 5] = [
    (CecId::G01, 0),
    (CecId::G04, 10),
    (CecId::G06, 0),
    (CecId::G08, 2),
    (CecId::G24, 0),
];

pub fn cec_seed(id: CecId) -> u64 {
    CEC_SEEDS.iter().find(|(i, _)| *i == id).map_or(0, |(_, s)| *s)
}

pub fn cases(suite: Suite) -> Vec<Case> {
    let mut out = Vec::new();
    let mut push = |problem: String, config: String, kind: Kind| {
        out.push(Case {
            id: out.len(),
            problem,
            config,
            kind,
        })
    };
    match suite {
        Suite::Analytic => {
            for zeta in [0.5, 0.9, 0.99] {
                let beta = 1e-3;
                push(
                    "analytic".into(),
                    format!("vanilla zeta {zeta} beta {beta} x0 (30,0)"),
                    Kind::Analytic { zeta, beta },
                );
            }
        }
        Suite::Cec => {
            for (id, seed) in CEC_SEEDS {
                let row = id.reference_settings();
                push(
                    id.to_string(),
                    format!("vanilla zeta {} beta {} seed {seed}", row.zeta, row.beta),
                    Kind::Cec { id, seed },
                );
            }
        }
        Suite::Qp => {
            for k in 0..20u64 {
                let n = 10 + (k as usize * 7) % 41;
                let p = (k as usize * 3) % 11;
                push(
                    format!("planted qp n {n} p {p}"),
                    format!("accelerated zeta 0.999 beta 0.01 tau 0.3 seed {k}"),
                    Kind::Qp { n, p, seed: k },
                );
            }
        }
        Suite::SnlSmall => {
            for (n, r) in [(20, 0.5), (50, 0.35), (100, 0.3)] {
                push(
                    format!("snl n {n} r {r}"),
                    "pipeline defaults, zeta 0.9999, seed 0".into(),
                    Kind::Snl { n, r, seed: 0 },
                );
            }
        }
    }
    out
}

fn run_case(case: &Case) -> Result<Row, String> {
    let t = Instant::now();
    let mut row = Row {
        id: case.id,
        problem: case.problem.clone(),
        config: case.config.clone(),
        iterations: 0,
        value: f64::NAN,
        reference: None,
        error: f64::NAN,
        threshold: f64::NAN,
        pass: false,
        note: String::new(),
        secs: 0.0,
    };
    let e = |e: gdam::Error| e.to_string();
    match case.kind {
        Kind::Analytic { zeta, beta } => {
            let cfg = SolverConfig {
                zeta,
                beta,
                exterior_start: true,
                record_trajectory: true,
                trajectory_stride: Some(1),
                max_iters: 200_000,
                ..SolverConfig::default()
            };
            let x0 = [30.0, 0.0];
            let out = vanilla_solve(&AnalyticProblem, &cfg, &Vector::from_vec(x0.to_vec())).map_err(e)?;
            let curve = AnalyticTrajectory::new(zeta, x0).map_err(e)?;
            let defect = out
                .trajectory
                .as_deref()
                .unwrap_or_default()
                .iter()
                .map(|p| curve.defect([p.x[0], p.x[1]]).abs())
                .fold(0.0, f64::max);
            let [k1, k2] = AnalyticProblem::KKT_POINT;
            row.iterations = out.iterations;
            row.value = out.objective;
            row.reference = Some(AnalyticProblem::OPTIMUM);
            row.error = (out.x[0] - k1).hypot(out.x[1] - k2);
            row.threshold = curve.apex_x1_bound() + 2.0 * beta;
            row.pass = row.error <= row.threshold && defect <= 50.0 * beta;
            row.note = format!(
                "distance to KKT point; {:?}; max defect {defect:.2e} (limit {:.0e})",
                out.termination,
                50.0 * beta
            );
        }
        Kind::Cec { id, seed } => {
            let p = CecProblem::new(id);
            let table = id.reference_settings();
            let x0 = p
                .sample_start(&mut ChaCha8Rng::seed_from_u64(seed), 0.05, 10_000_000)
                .map_err(e)?;
            let cfg = SolverConfig {
                zeta: table.zeta,
                beta: table.beta,
                max_iters: 200_000,
                ..SolverConfig::default()
            };
            let out = vanilla_solve(&p, &cfg, &x0).map_err(e)?;
            row.iterations = out.iterations;
            row.value = out.objective;
            row.reference = Some(table.reference);
            row.error = out.objective_error(table.reference);
            row.threshold = if id == CecId::G04 { 5e-4 } else { (2.0 * table.error).min(2e-2) };
            let iters_ok = out.iterations <= 3 * table.iterations && 3 * out.iterations >= table.iterations;
            row.pass = row.error <= row.threshold && iters_ok;
            row.note = format!(
                "published error {:.2e}, published iterations {}",
                table.error, table.iterations
            );
        }
        Kind::Qp { n, p, seed } => {
            let planted = planted_qp(n, p, seed).map_err(e)?;
            let qp = &planted.problem;
            let x0 = qp.feasible_start().map_err(e)?;
            let cfg = SolverConfig {
                zeta: 0.999,
                beta: 1e-2,
                tau: 0.3,
                max_iters: 50_000,
                ..SolverConfig::default()
            };
            let out = accelerated_solve(qp, &cfg, &x0).map_err(e)?;
            row.iterations = out.iterations;
            row.value = out.objective;
            row.reference = Some(planted.f_star);
            row.error = out.objective_error(planted.f_star);
            row.threshold = 1e-3;
            row.pass = row.error <= row.threshold;
            row.note = format!("{} restarts", out.restarts);
        }
        Kind::Snl { n, r, seed } => {
            let g = generate_instance(&GenerateOptions::new(n, r, seed)).map_err(e)?;
            let res = localize(&g.instance, &SnlConfig::default()).map_err(e)?;
            let refined = res.rmsd_refined.unwrap_or(f64::INFINITY);
            let rank = res.rank_proxy.unwrap_or(f64::INFINITY);
            row.iterations = res.iterations;
            row.value = refined;
            row.reference = Some(0.0);
            row.error = refined;
            row.threshold = 1e-2;
            row.pass = res.is_solved() && refined <= 1e-2;
            if n == 100 {
                row.pass &= rank <= 1e-2 && res.iterations <= 768;
            }
            row.note = format!(
                "rmsd before refinement {:.2e}, rank proxy {rank:.1e}",
                res.rmsd_sdp.unwrap_or(f64::NAN)
            );
        }
    }
    row.secs = t.elapsed().as_secs_f64();
    Ok(row)
}

/// Runs every case on `threads` workers; rows come back ordered by case id.
pub fn run_cases(cases: &[Case], threads: usize) -> Vec<Result<Row, String>> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<Row, String>>>> = Mutex::new(vec![None; cases.len()]);
    std::thread::scope(|s| {
        for _ in 0..threads.clamp(1, cases.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(case) = cases.get(i) else { break };
                let row = run_case(case);
                slots.lock().unwrap()[i] = Some(row);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|r| r.expect("every case ran")).collect()
}

fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.6e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(rows: &[Row]) -> String {
    let mut s = String::from("id,problem,config,iterations,value,reference,error,threshold,pass,note\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.id,
            csv_field(&r.problem),
            csv_field(&r.config),
            r.iterations,
            num(r.value),
            r.reference.map(num).unwrap_or_default(),
            num(r.error),
            num(r.threshold),
            if r.pass { "pass" } else { "fail" },
            csv_field(&r.note)
        );
    }
    s
}

pub fn render_markdown(suite: Suite, rows: &[Row]) -> String {
    let mut s = format!("# Benchmark: {}\n\n", suite.name());
    s.push_str("| id | problem | config | iterations | value | error | threshold | result | note |\n");
    s.push_str("|---:|---|---|---:|---:|---:|---:|---|---|\n");
    for r in rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {:.6e} | {:.2e} | {:.2e} | {} | {} |",
            r.id,
            r.problem,
            r.config,
            r.iterations,
            r.value,
            r.error,
            r.threshold,
            if r.pass { "pass" } else { "**fail**" },
            r.note
        );
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let _ = writeln!(s, "\n{passed} of {} cases pass.", rows.len());
    s
}

pub fn run(ctx: &Ctx, args: &BenchArgs) -> CliResult<()> {
    let mut run = Run::new("bench", &ctx.argv, &ctx.out)?;
    let cases = cases(args.suite);
    run.config(&serde_json::json!({ "suite": args.suite, "cases": cases }))?;
    let threads = args
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let results = run_cases(&cases, threads);
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (case, r) in cases.iter().zip(results) {
        match r {
            Ok(row) => {
                run.time(&format!("case {}", row.id), row.secs);
                rows.push(row);
            }
            Err(msg) => errors.push(format!("case {} ({}): {msg}", case.id, case.problem)),
        }
    }
    let name = args.suite.name();
    run.write(&format!("bench-{name}.csv"), &render_csv(&rows))?;
    run.write(&format!("bench-{name}.md"), &render_markdown(args.suite, &rows))?;
    run.finish()?;
    for r in &rows {
        println!(
            "{:>3} {:<24} {} error {:.2e} threshold {:.2e}",
            r.id,
            r.problem,
            if r.pass { "PASS" } else { "FAIL" },
            r.error,
            r.threshold
        );
    }
    if !errors.is_empty() {
        return Err(CliError::Numerical(errors.join("; ")));
    }
    let failed: Vec<usize> = rows.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    if !failed.is_empty() {
        return Err(CliError::Acceptance(format!("cases {failed:?} missed their thresholds")));
    }
    Ok(())
}
