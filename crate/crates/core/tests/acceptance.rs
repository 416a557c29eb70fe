//! One line per acceptance criterion. Exits nonzero if any criterion fails.

mod common;

use std::time::Instant;

use common::*;
use gdam::linalg::EqualityProjector;
use gdam::problems::*;
use gdam::snl::*;
use gdam::solver::*;
use gdam::{gdam_direction, msdm_direction, BarrierProblem, Problem, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Instrumentation totals over every run in the suite.
#[derive(Default)]
struct Audit {
    runs: usize,
    vanilla_runs: usize,
    infeasible: usize,
    nonmonotone: usize,
    boundary_checks: usize,
    boundary_failures: Vec<String>,
}

impl Audit {
    /// Counts the solver's own audit and re-checks any recorded trajectory.
    fn record<P: BarrierProblem + ?Sized>(&mut self, problem: &P, out: &SolveResult, vanilla: bool) {
        self.runs += 1;
        self.infeasible += out.stats.infeasible_accepted;
        if let Some(tr) = &out.trajectory {
            let first_interior = tr.iter().position(|p| problem.is_strictly_interior(&Vector::from_vec(p.x.clone())));
            if let Some(start) = first_interior {
                self.infeasible += tr[start..]
                    .iter()
                    .filter(|p| !problem.is_strictly_interior(&Vector::from_vec(p.x.clone())))
                    .count();
            }
        }
        if vanilla {
            self.vanilla_runs += 1;
            self.nonmonotone += out.stats.nonmonotone_accepted;
            if let Some(tr) = &out.trajectory {
                self.nonmonotone += tr.windows(2).filter(|w| w[1].k > w[0].k && !(w[1].f < w[0].f)).count();
            }
        }
    }

    fn check_boundary<P: BarrierProblem + ?Sized>(
        &mut self,
        label: &str,
        problem: &P,
        out: &SolveResult,
        zeta: f64,
        beta: f64,
    ) {
        if !out.termination.is_boundary() {
            return;
        }
        self.boundary_checks += 1;
        let proj = projector_for(problem);
        match centrality_with_margin(problem, &out.x, zeta, beta, proj.as_ref()) {
            Some(c) => {
                let cos_ok = c.cos_theta <= -zeta + c.delta;
                let eps_ok = c.residual <= (2.0 * (1.0 - zeta)).sqrt() + c.delta;
                if !(cos_ok && eps_ok) {
                    self.boundary_failures.push(format!(
                        "{label}: cos {:.6} eps {:.4} delta {:.2e}",
                        c.cos_theta, c.residual, c.delta
                    ));
                }
            }
            None => self.boundary_failures.push(format!("{label}: no diagnostics at x#")),
        }
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, start: Instant, limit_secs: Option<f64>, out: Outcome) -> bool {
    let secs = start.elapsed().as_secs_f64();
    let time_ok = limit_secs.is_none_or(|l| secs < l);
    let pass = out.pass && time_ok;
    let limit = limit_secs.map(|l| format!(" limit {l}s")).unwrap_or_default();
    println!(
        "criterion {id:>2} {} {name}: {} ({secs:.2}s{limit})",
        if pass { "PASS" } else { "FAIL" },
        out.detail
    );
    pass
}

fn v(x: &[f64]) -> Vector {
    Vector::from_vec(x.to_vec())
}

// Closed-form curve through (30, 0), written out independently of the library.
fn curve_defect(zeta: f64, x0: [f64; 2], p: &[f64]) -> f64 {
    let xbar2 = 0.5 * (x0[1] + x0[0].hypot(x0[1]));
    p[1] + p[0].hypot(p[1]) - 2.0 * xbar2 * (p[0] / x0[0]).abs().powf(1.0 - zeta)
}

// RK4 on dx/dt = -x/|x| + ζ e₂ for a short arc; the closed form must hold on it.
fn rk4_curve_check(zeta: f64, x0: [f64; 2]) -> f64 {
    let field = |x: [f64; 2]| {
        let r = x[0].hypot(x[1]);
        [-x[0] / r, -x[1] / r + zeta]
    };
    let mut x = x0;
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..20_000 {
        let k1 = field(x);
        let k2 = field([x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]]);
        let k3 = field([x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]]);
        let k4 = field([x[0] + h * k3[0], x[1] + h * k3[1]]);
        for i in 0..2 {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x[0].abs() < 1.0 {
            break;
        }
        worst = worst.max(curve_defect(zeta, x0, &x).abs());
    }
    worst
}

fn analytic_runs(audit: &mut Audit) -> Vec<(f64, f64, SolveResult)> {
    let mut runs = Vec::new();
    for zeta in [0.5, 0.9, 0.99] {
        for beta in [1e-3, 5e-4] {
            let cfg = SolverConfig {
                zeta,
                beta,
                exterior_start: true,
                record_trajectory: true,
                max_iters: 200_000,
                ..Default::default()
            };
            let out = vanilla_solve(&AnalyticProblem, &cfg, &v(&[30.0, 0.0])).expect("analytic run");
            audit.record(&AnalyticProblem, &out, true);
            audit.check_boundary(&format!("analytic zeta {zeta} beta {beta}"), &AnalyticProblem, &out, zeta, beta);
            runs.push((zeta, beta, out));
        }
    }
    runs
}

fn criterion_1(runs: &[(f64, f64, SolveResult)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for zeta in [0.5, 0.9, 0.99] {
        let oracle = rk4_curve_check(zeta, [30.0, 0.0]);
        let max_defect = |beta: f64| {
            let (_, _, out) = runs.iter().find(|(z, b, _)| *z == zeta && *b == beta).unwrap();
            out.trajectory
                .as_ref()
                .unwrap()
                .iter()
                .map(|p| curve_defect(zeta, [30.0, 0.0], &p.x).abs())
                .fold(0.0, f64::max)
        };
        let (d1, d2) = (max_defect(1e-3), max_defect(5e-4));
        let ratio = d2 / d1;
        let ok = oracle <= 1e-8 && d1 <= 50.0 * 1e-3 && (0.3..=0.7).contains(&ratio);
        pass &= ok;
        parts.push(format!("zeta {zeta}: max defect {d1:.2e} (<= 5e-2), halved ratio {ratio:.3}"));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_2(runs: &[(f64, f64, SolveResult)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let xbar2 = 15.0;
    for (zeta, beta, out) in runs.iter().filter(|(_, b, _)| *b == 1e-3) {
        let err = (out.x[0]).hypot(out.x[1] - 10.0);
        let bound = xbar2 / zeta * (1.0 - zeta * zeta).sqrt() + 2.0 * beta;
        pass &= err <= bound;
        parts.push(format!("zeta {zeta}: |x# - (0,10)| = {err:.3e} <= {bound:.3e}"));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_3(audit: &mut Audit) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..20 {
        let zeta = rng.random_range(0.8..0.995);
        let beta = 1e-2;
        let cfg = SolverConfig { zeta, beta, ..Default::default() };
        match k % 4 {
            0 | 1 => {
                let x0 = v(&[rng.random_range(-20.0..20.0), rng.random_range(10.5..40.0)]);
                let out = vanilla_solve(&AnalyticProblem, &cfg, &x0).expect("analytic start");
                audit.record(&AnalyticProblem, &out, true);
                audit.check_boundary(&format!("random analytic #{k}"), &AnalyticProblem, &out, zeta, beta);
            }
            2 => {
                let p = CecProblem::new(CecId::G06);
                let x0 = p.sample_start(&mut rng, 0.0, 1_000_000).unwrap();
                let out = vanilla_solve(&p, &cfg, &x0).expect("G06 start");
                audit.record(&p, &out, true);
                audit.check_boundary(&format!("random G06 #{k}"), &p, &out, zeta, beta);
            }
            _ => {
                let p = NonconvexProblem;
                let x0 = loop {
                    let x = v(&[rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]);
                    if BarrierProblem::is_strictly_interior(&p, &x) {
                        break x;
                    }
                };
                let out = vanilla_solve(&p, &cfg, &x0).expect("nonconvex start");
                audit.record(&p, &out, true);
                audit.check_boundary(&format!("random nonconvex #{k}"), &p, &out, zeta, beta);
            }
        }
    }
    Outcome { pass: true, detail: String::new() }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 1.0;
    let mut count = 0;
    for &n in &[2usize, 5, 50] {
        for &c in &[1.0, 2.0, 10.0, 99.0] {
            let pairs = if n == 50 { 84 } else { 83 };
            for _ in 0..pairs {
                let gf = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
                let gg = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
                let zeta = (c - 1.0) / (c + 1.0);
                let a = gdam_direction(&gf, &gg, zeta).unwrap().direction;
                let b = msdm_direction(&gf, &gg, c).unwrap();
                worst = worst.min(a.dot(&b) / (a.norm() * b.norm()));
                count += 1;
            }
        }
    }
    Outcome {
        pass: count >= 1000 && worst >= 1.0 - 1e-10,
        detail: format!("{count} pairs, min cosine similarity 1 - {:.1e}", 1.0 - worst),
    }
}

// Known minimizers, checked against the reference values before use.
fn cec_optimizer(id: CecId) -> Vec<f64> {
    match id {
        CecId::G01 => vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 1.0],
        CecId::G04 => vec![78.0, 33.0, 29.995256025681, 45.0, 36.775812905788],
        CecId::G06 => vec![14.095, 0.84296078921548],
        CecId::G08 => vec![1.2279713526075, 4.2453733661227],
        CecId::G24 => vec![2.3295201974776, 3.1784930741177],
    }
}

const CEC_SEEDS: [(CecId, [u64; 3]); 4] = [
    (CecId::G04, [10, 11, 12]),
    (CecId::G06, [0, 1, 2]),
    (CecId::G08, [2, 29, 36]),
    (CecId::G24, [0, 2, 3]),
];

fn criterion_5(audit: &mut Audit) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (id, seeds) in CEC_SEEDS {
        let p = CecProblem::new(id);
        let row = id.reference_settings();
        let f_opt = Problem::objective(&p, &v(&cec_optimizer(id)));
        let reference_ok = (f_opt - row.reference).abs() <= 1e-4 * (1.0 + row.reference.abs());
        let limit = if id == CecId::G04 { 5e-4 } else { (2.0 * row.error).min(2e-2) };
        let mut worst: f64 = 0.0;
        let mut iters = Vec::new();
        let mut iters_ok = true;
        for seed in seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x0 = p.sample_start(&mut rng, 0.05, 10_000_000).unwrap();
            let cfg = SolverConfig {
                zeta: 0.98,
                beta: row.beta,
                max_iters: 200_000,
                record_trajectory: true,
                ..Default::default()
            };
            let out = vanilla_solve(&p, &cfg, &x0).unwrap();
            audit.record(&p, &out, true);
            audit.check_boundary(&format!("{id} seed {seed}"), &p, &out, 0.98, row.beta);
            let err = (row.reference - out.objective).abs() / (1.0 + row.reference.abs());
            worst = worst.max(err);
            iters_ok &= 3 * out.iterations >= row.iterations && out.iterations <= 3 * row.iterations;
            iters.push(out.iterations);
        }
        let ok = reference_ok && worst <= limit && iters_ok;
        pass &= ok;
        parts.push(format!("{id} err {worst:.2e} (<= {limit:.2e}) iters {iters:?} vs {}", row.iterations));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_6(audit: &mut Audit) -> Outcome {
    let mut pass = true;
    let mut worst_err: f64 = 0.0;
    let mut worst_kkt: f64 = 0.0;
    let mut worst_proj: f64 = 0.0;
    let mut failed = Vec::new();
    for k in 0..20u64 {
        let n = 10 + (k as usize * 7) % 41;
        let p = (k as usize * 3) % 11;
        let pq = planted_qp(n, p, k).unwrap();
        let qp = &pq.problem;
        // oracle: the planted point must certify itself
        let kkt = qp_kkt_violation(qp, &pq.x_star);
        worst_kkt = worst_kkt.max(kkt);
        let f_star = qp_dense_objective(qp, &pq.x_star);
        if p > 0 {
            let proj = EqualityProjector::new(&qp.equalities.a).unwrap();
            let m = proj.matrix();
            let a = qp.equalities.a.to_dense();
            worst_proj = worst_proj
                .max((&m * &m - &m).amax())
                .max((&a * &m).amax())
                .max((&m - m.transpose()).amax());
        }
        let x0 = qp.feasible_start().unwrap();
        let cfg = SolverConfig {
            zeta: 0.999,
            beta: 1e-2,
            tau: 0.3,
            max_iters: 50_000,
            ..Default::default()
        };
        let out = accelerated_solve(qp, &cfg, &x0).unwrap();
        audit.record(qp, &out, false);
        audit.check_boundary(&format!("qp #{k}"), qp, &out, 0.999, 1e-2);
        let err = (f_star - out.objective).abs() / (1.0 + f_star.abs());
        worst_err = worst_err.max(err);
        if err > 1e-3 {
            failed.push(k);
        }
    }
    pass &= worst_err <= 1e-3 && worst_kkt <= 1e-8 && worst_proj <= 1e-10;
    Outcome {
        pass,
        detail: format!(
            "20 planted QPs, worst objective error {worst_err:.2e} (<= 1e-3), failures {failed:?}, \
             oracle KKT violation {worst_kkt:.1e}, projector invariants {worst_proj:.1e} (<= 1e-10)"
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut worst_name = String::new();
    let mut check = |name: &str, analytic: Vector, fd: Vector| {
        let e = relative_error(&analytic, &fd);
        if e > worst {
            worst = e;
            worst_name = name.to_string();
        }
    };
    let h = 1e-6;
    for _ in 0..20 {
        let x = v(&[rng.random_range(-20.0..20.0), rng.random_range(10.5..40.0)]);
        let g = gdam::barrier::barrier_gradient(&AnalyticProblem, &x).unwrap();
        check("analytic", g, central_fd(|y| gdam::barrier::barrier_value(&AnalyticProblem, y).unwrap(), &x, h));
    }
    for _ in 0..20 {
        let x = loop {
            let x = v(&[rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]);
            if min_slack(&NonconvexProblem, &x) >= 100.0 * h {
                break x;
            }
        };
        let g = gdam::barrier::barrier_gradient(&NonconvexProblem, &x).unwrap();
        check("nonconvex", g, central_fd(|y| gdam::barrier::barrier_value(&NonconvexProblem, y).unwrap(), &x, h));
    }
    for id in CecId::ALL {
        let p = CecProblem::new(id);
        for _ in 0..20 {
            let x = loop {
                let x = p.sample_start(&mut rng, 0.0, 10_000_000).unwrap();
                if min_slack(&p, &x) >= 100.0 * h {
                    break x;
                }
            };
            let g = gdam::barrier::barrier_gradient(&p, &x).unwrap();
            check(&id.to_string(), g, central_fd(|y| gdam::barrier::barrier_value(&p, y).unwrap(), &x, h));
        }
    }
    let pq = planted_qp(12, 3, 99).unwrap();
    let x = pq.problem.feasible_start().unwrap();
    let g = gdam::barrier::barrier_gradient(&pq.problem, &x).unwrap();
    check("qp", g, central_fd(|y| gdam::barrier::barrier_value(&pq.problem, y).unwrap(), &x, h));

    for (n, seed) in [(3usize, 1u64), (5, 2), (8, 3)] {
        let inst = generate_instance(&GenerateOptions::new(n, 0.8, seed)).unwrap().instance;
        let z0 = phase1_initialize(&inst, &Phase1Options::default()).unwrap().z;
        for _ in 0..5 {
            let z = loop {
                let dz = Vector::from_fn(z0.len(), |_, _| rng.random_range(-1e-2..1e-2));
                let z = &z0 + dz;
                if dense_neg_log_det(&dense_slack(&inst, &z)).is_finite() {
                    break z;
                }
            };
            let eval = dual_barrier_objective(&inst, &z).unwrap();
            let fd = central_fd(|y| dense_neg_log_det(&dense_slack(&inst, y)), &z, h);
            check(&format!("snl n={n}"), eval.barrier_gradient, fd);
        }
    }
    Outcome {
        pass: worst <= 1e-5,
        detail: format!(
            "worst relative error {worst:.2e} ({worst_name}) over all shipped problems and SNL n <= 8, h = {h:.0e}"
        ),
    }
}

fn criterion_8(audit: &mut Audit) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, r, seed) in [(100usize, 0.3, 0u64), (50, 0.35, 0), (20, 0.5, 0)] {
        let g = generate_instance(&GenerateOptions::new(n, r, seed)).unwrap();
        let res = localize(&g.instance, &SnlConfig::default()).unwrap();
        audit.runs += 2;
        audit.vanilla_runs += 1;
        audit.infeasible += res.infeasible_accepted;
        audit.nonmonotone += res.polish_nonmonotone;
        let refined = res.rmsd_refined.unwrap_or(f64::INFINITY);
        let rank = res.rank_proxy.unwrap_or(f64::INFINITY);
        let mut ok = res.is_solved() && refined <= 1e-2;
        if n == 100 {
            ok &= rank <= 1e-2 && res.iterations <= 768;
        }
        pass &= ok;
        parts.push(format!(
            "n {n} r {r}: rmsd refined {refined:.1e} (sdp {:.2e}) rank {rank:.1e} iters {}",
            res.rmsd_sdp.unwrap_or(f64::NAN),
            res.iterations
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn main() {
    let mut audit = Audit::default();
    let mut all = true;

    let t = Instant::now();
    let runs = analytic_runs(&mut audit);
    let analytic_secs = t.elapsed().as_secs_f64();
    all &= report(1, "analytic trajectory conformance", t, Some(1.0), criterion_1(&runs));
    let t2 = Instant::now();
    let out2 = criterion_2(&runs);
    // the runs are shared with criterion 1
    let secs2 = analytic_secs + t2.elapsed().as_secs_f64();
    let pass2 = out2.pass && secs2 < 1.0;
    println!(
        "criterion  2 {} KKT proximity bound: {} ({secs2:.2}s limit 1s)",
        if pass2 { "PASS" } else { "FAIL" },
        out2.detail
    );
    all &= pass2;

    let t3 = Instant::now();
    criterion_3(&mut audit);
    let secs3_random = t3.elapsed().as_secs_f64();
    let t = Instant::now();
    all &= report(4, "MSDM and GDAM directions agree", t, Some(1.0), criterion_4());
    let t = Instant::now();
    let c5 = criterion_5(&mut audit);
    let t = {
        let pass = report(5, "CEC reference reproduction", t, Some(30.0), c5);
        all &= pass;
        Instant::now()
    };
    all &= report(6, "QP correctness", t, Some(60.0), criterion_6(&mut audit));
    let t = Instant::now();
    all &= report(7, "gradient fidelity", t, Some(10.0), criterion_7());
    let t = Instant::now();
    all &= report(8, "SNL desk-scale pipeline", t, Some(180.0), criterion_8(&mut audit));

    let pass3 = audit.boundary_failures.is_empty() && audit.boundary_checks > 0;
    println!(
        "criterion  3 {} boundary centrality: {} boundary terminations checked ({} from 20 random starts, {secs3_random:.2}s), failures: {:?}",
        if pass3 { "PASS" } else { "FAIL" },
        audit.boundary_checks,
        20,
        audit.boundary_failures
    );
    all &= pass3;
    let pass9 = audit.infeasible == 0;
    println!(
        "criterion  9 {} interior-point invariant: {} infeasible accepted iterates over {} runs",
        if pass9 { "PASS" } else { "FAIL" },
        audit.infeasible,
        audit.runs
    );
    all &= pass9;
    let pass10 = audit.nonmonotone == 0;
    println!(
        "criterion 10 {} monotonicity: {} non-decreasing accepted steps over {} vanilla runs",
        if pass10 { "PASS" } else { "FAIL" },
        audit.nonmonotone,
        audit.vanilla_runs
    );
    all &= pass10;

    if !all {
        std::process::exit(1);
    }
}
