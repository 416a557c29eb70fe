use crate::barrier::{BarrierProblem, Vector};
use crate::error::{Error, Result};

use super::{
    audit_interior, build_projector, check_start, diagnostics_at, direction_at, fixed_length_step, Recorder,
    SolveResult, SolveStats, SolverConfig, Termination,
};

/// Fixed-length GDAM iteration with backtracking on constraint violation.
///
/// ```
/// use gdam::problems::AnalyticProblem;
/// use gdam::solver::{vanilla_solve, SolverConfig, Termination};
/// use gdam::Vector;
///
/// let config = SolverConfig { zeta: 0.9, beta: 0.5, ..Default::default() };
/// let out = vanilla_solve(&AnalyticProblem, &config, &Vector::from_vec(vec![3.0, 15.0])).unwrap();
/// assert_eq!(out.termination, Termination::BoundaryReachedStepFloor);
/// assert!(out.x[1] > 10.0);
/// ```
pub fn vanilla_solve<P: BarrierProblem + ?Sized>(
    problem: &P,
    config: &SolverConfig,
    x0: &Vector,
) -> Result<SolveResult> {
    let mut interior = check_start(problem, config, x0)?;
    let projector = build_projector(problem)?;
    let projector = projector.as_ref();

    let mut x = x0.clone();
    let mut f = problem.objective(&x);
    let mut beta = config.beta;
    let mut stats = SolveStats::default();
    let mut recorder = Recorder::new(config, problem.dim());
    let mut entered = interior;
    let mut iterations = 0;
    let mut direction = None;

    recorder.record(problem, projector, 0, &x, f, beta, true);

    let termination = loop {
        if iterations >= config.max_iters {
            break Termination::MaxIters;
        }
        let s = match direction.take() {
            Some(s) => s,
            None => {
                let gf_norm = problem.objective_gradient(&x).norm();
                if gf_norm <= config.zero_grad_tol * (1.0 + f.abs()) {
                    break Termination::StationaryObjective;
                }
                match direction_at(problem, &x, interior, config, projector) {
                    Ok(out) => out.direction,
                    Err(Error::DegenerateObjectiveGradient) => break Termination::StationaryObjective,
                    Err(e) => return Err(e),
                }
            }
        };
        iterations += 1;
        let alpha = fixed_length_step(beta, &s)?;
        let trial = &x + &s * alpha;
        let trial_interior = problem.is_strictly_interior(&trial);

        if entered && !trial_interior {
            stats.rejected_violation += 1;
            if !config.line_search {
                break Termination::BoundaryReachedNoLineSearch;
            }
            beta *= config.tau;
            if beta < config.beta_min {
                break Termination::BoundaryReachedStepFloor;
            }
            direction = Some(s);
            continue;
        }

        let f_trial = problem.objective(&trial);
        if f_trial >= f && config.reject_nondescent {
            stats.rejected_nondescent += 1;
            if !config.line_search {
                break Termination::StationaryObjective;
            }
            beta *= config.tau;
            if beta < config.beta_min {
                break Termination::StationaryObjective;
            }
            direction = Some(s);
            continue;
        }

        if f_trial >= f {
            stats.nonmonotone_accepted += 1;
        }
        x = trial;
        f = f_trial;
        interior = trial_interior;
        stats.accepted += 1;
        if entered {
            if !audit_interior(problem, &x) {
                stats.infeasible_accepted += 1;
            }
        } else {
            stats.exterior_accepted += 1;
            entered = interior;
        }
        recorder.record(problem, projector, stats.accepted, &x, f, beta, false);
    };

    recorder.record(problem, projector, stats.accepted, &x, f, beta, true);
    let diagnostics = if interior {
        diagnostics_at(problem, &x, config.zeta, projector)
    } else {
        None
    };
    Ok(SolveResult {
        x,
        objective: f,
        diagnostics,
        iterations,
        restarts: 0,
        termination,
        final_beta: beta,
        entered_interior: entered,
        stats,
        trajectory: recorder.finish(),
    })
}
