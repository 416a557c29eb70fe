use crate::barrier::{BarrierProblem, Vector};
use crate::error::{Error, Result};

use super::{
    audit_interior, build_projector, check_start, diagnostics_at, direction_at, fixed_length_step, restart_check,
    Recorder, SolveResult, SolveStats, SolverConfig, Termination,
};

/// GDAM with heavy-ball extrapolation and objective-monitored restarts.
///
/// Each pass takes a fixed-length step from the extrapolated point,
/// `x_k = y_k + α s(y_k)`, then extrapolates `y_{k+1} = x_k + m (x_k - x_{k-1})`.
/// Every `monitor_period` accepted steps the objective is sampled; an increase
/// or a stalled decrease triggers a restart, which drops the momentum and
/// multiplies `β` by `κ` (never beyond its initial value); a restart that
/// finds the objective no lower than at the previous restart shrinks `β` by
/// `τ` instead. A violated trial
/// point sends the iteration back to the last accepted iterate with momentum
/// cleared and `β` shrunk by `τ`; an extrapolated point outside the interior
/// is handled the same way. A step taken without momentum that fails to
/// lower the objective is rejected and shrinks `β`, as in [`super::vanilla_solve`].
pub fn accelerated_solve<P: BarrierProblem + ?Sized>(
    problem: &P,
    config: &SolverConfig,
    x0: &Vector,
) -> Result<SolveResult> {
    if !check_start(problem, config, x0)? {
        return Err(Error::InfeasibleStart {
            index: 0,
            value: problem.max_constraint(x0).unwrap_or(f64::NAN),
        });
    }
    let projector = build_projector(problem)?;
    let projector = projector.as_ref();
    let m = config.momentum;

    let mut x = x0.clone();
    let mut f = problem.objective(&x);
    let mut y = x.clone();
    let mut beta = config.beta;
    let mut stats = SolveStats::default();
    let mut recorder = Recorder::new(config, problem.dim());
    let mut history = vec![f];
    let mut restarts = 0;
    let mut f_last_restart = f;
    let mut iterations = 0;
    // direction at `y`, kept across rejections that leave `y` unchanged
    let mut direction: Option<Vector> = None;

    recorder.record(problem, projector, 0, &x, f, beta, true);

    let termination = loop {
        if iterations >= config.max_iters {
            break Termination::MaxIters;
        }
        let s = match direction.take() {
            Some(s) => s,
            None => {
                let fy = problem.objective(&y);
                let gf_norm = problem.objective_gradient(&y).norm();
                if gf_norm <= config.zero_grad_tol * (1.0 + fy.abs()) {
                    if y == x {
                        break Termination::StationaryObjective;
                    }
                    y = x.clone();
                    continue;
                }
                match direction_at(problem, &y, true, config, projector) {
                    Ok(out) => out.direction,
                    Err(Error::DegenerateObjectiveGradient) if y == x => break Termination::StationaryObjective,
                    Err(Error::DegenerateObjectiveGradient) => {
                        y = x.clone();
                        continue;
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        iterations += 1;
        let alpha = fixed_length_step(beta, &s)?;
        let trial = &y + &s * alpha;

        if !problem.is_strictly_interior(&trial) {
            stats.rejected_violation += 1;
            if !config.line_search {
                break Termination::BoundaryReachedNoLineSearch;
            }
            beta *= config.tau;
            if beta < config.beta_min {
                break Termination::BoundaryReachedStepFloor;
            }
            if y == x {
                direction = Some(s);
            } else {
                y = x.clone();
            }
            continue;
        }

        let f_trial = problem.objective(&trial);
        // a step without momentum is a vanilla step and follows its rule
        if f_trial >= f && y == x && config.reject_nondescent {
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
        let prev = std::mem::replace(&mut x, trial);
        let mut momentum = m > 0.0;
        f = f_trial;
        stats.accepted += 1;
        if !audit_interior(problem, &x) {
            stats.infeasible_accepted += 1;
        }
        recorder.record(problem, projector, stats.accepted, &x, f, beta, false);

        if config.restart.enabled && stats.accepted % config.restart.monitor_period == 0 {
            history.push(f);
            if restart_check(&history, config.restart.slowdown_tol) {
                restarts += 1;
                if f < f_last_restart {
                    beta = (beta * config.restart.kappa).min(config.beta);
                } else {
                    beta *= config.tau;
                    if beta < config.beta_min {
                        break Termination::BoundaryReachedStepFloor;
                    }
                }
                f_last_restart = f;
                momentum = false;
                history.clear();
                history.push(f);
            }
        }

        y = if momentum { &x + (&x - &prev) * m } else { x.clone() };
        if y != x && !problem.is_strictly_interior(&y) {
            stats.rejected_violation += 1;
            y = x.clone();
            if config.line_search {
                beta *= config.tau;
                if beta < config.beta_min {
                    break Termination::BoundaryReachedStepFloor;
                }
            }
        }
    };

    recorder.record(problem, projector, stats.accepted, &x, f, beta, true);
    let diagnostics = diagnostics_at(problem, &x, config.zeta, projector);
    Ok(SolveResult {
        x,
        objective: f,
        diagnostics,
        iterations,
        restarts,
        termination,
        final_beta: beta,
        entered_interior: true,
        stats,
        trajectory: recorder.finish(),
    })
}
