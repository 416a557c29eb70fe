//! Vanilla and accelerated GDAM iterations with fixed-length steps.
//!
//! Every accepted update has Euclidean length exactly `β`: the step along
//! `s_ζ(x)` is `α = β / |s_ζ(x)|`. A trial point that leaves the strict
//! interior is never accepted; with the line search enabled `β` shrinks by
//! `τ` and the iteration retries from the last accepted point, and the solve
//! stops once `β` falls below `β_min`. Without the line search the first
//! violation ends the solve.

mod accelerated;
mod vanilla;

pub use accelerated::accelerated_solve;
pub use vanilla::vanilla_solve;

use serde::{Deserialize, Serialize};

use crate::barrier::{centrality_with_tol, BarrierProblem, CentralityDiagnostics, Vector, BARRIER_ZERO_RTOL};
use crate::direction::{gdam_direction_with_tol, projected_gdam_direction_with_tol, DirectionOutput};
use crate::error::{Error, Result};
use crate::linalg::EqualityProjector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartConfig {
    pub enabled: bool,
    /// Step-length multiplier applied on restart.
    pub kappa: f64,
    /// Objective sampling period, in accepted iterations.
    pub monitor_period: usize,
    /// Relative decrease between samples below which progress counts as stalled.
    pub slowdown_tol: f64,
}

impl Default for RestartConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            kappa: 2.0,
            monitor_period: 25,
            slowdown_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub zeta: f64,
    /// Initial step length, in variable-space units.
    pub beta: f64,
    pub beta_min: f64,
    /// Backtracking factor applied to `β` on a rejected step.
    pub tau: f64,
    pub line_search: bool,
    /// Momentum of the accelerated scheme; ignored by the vanilla one.
    pub momentum: f64,
    pub max_iters: usize,
    pub restart: RestartConfig,
    pub record_trajectory: bool,
    /// Recording stride; `None` records every iterate in two dimensions and
    /// every `monitor_period` iterates otherwise.
    pub trajectory_stride: Option<usize>,
    pub zero_grad_tol: f64,
    pub barrier_zero_rtol: f64,
    /// Reject steps that do not decrease the objective (vanilla scheme).
    pub reject_nondescent: bool,
    /// Let single-constraint problems start outside the feasible set; the
    /// iteration follows `∇g` until it enters the interior.
    pub exterior_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            zeta: 0.99,
            beta: 0.1,
            beta_min: 1e-8,
            tau: 0.3,
            line_search: true,
            momentum: 0.9,
            max_iters: 10_000,
            restart: RestartConfig::default(),
            record_trajectory: false,
            trajectory_stride: None,
            zero_grad_tol: 1e-10,
            barrier_zero_rtol: BARRIER_ZERO_RTOL,
            reject_nondescent: true,
            exterior_start: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(0.0..=1.0).contains(&self.zeta) {
            return bad(format!("zeta = {} outside [0, 1]", self.zeta));
        }
        if !(self.beta_min > 0.0 && self.beta > self.beta_min) {
            return bad(format!(
                "need beta > beta_min > 0 (beta = {}, beta_min = {})",
                self.beta, self.beta_min
            ));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return bad(format!("tau = {} outside (0, 1)", self.tau));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum = {} outside [0, 1)", self.momentum));
        }
        if self.restart.enabled && (self.restart.monitor_period == 0 || !(self.restart.kappa > 0.0)) {
            return bad("restart needs monitor_period > 0 and kappa > 0".into());
        }
        Ok(())
    }

    fn stride(&self, dim: usize) -> usize {
        self.trajectory_stride
            .unwrap_or(if dim <= 2 { 1 } else { self.restart.monitor_period.max(1) })
            .max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// A constraint was violated with `β` already below `β_min`.
    BoundaryReachedStepFloor,
    /// A constraint was violated and no line search was configured.
    BoundaryReachedNoLineSearch,
    MaxIters,
    /// Interior critical point: the objective gradient vanished or no step of
    /// length `β >= β_min` decreases the objective.
    StationaryObjective,
}

impl Termination {
    pub fn is_boundary(self) -> bool {
        matches!(
            self,
            Termination::BoundaryReachedStepFloor | Termination::BoundaryReachedNoLineSearch
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub k: usize,
    pub x: Vec<f64>,
    pub f: f64,
    pub max_g: Option<f64>,
    pub cos_theta: Option<f64>,
    pub residual: Option<f64>,
    pub beta: f64,
}

/// Counters collected while iterating.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub accepted: usize,
    pub rejected_violation: usize,
    pub rejected_nondescent: usize,
    /// Accepted iterates taken before the iteration first entered the interior.
    pub exterior_accepted: usize,
    /// Accepted iterates after entry that fail an independent interior check.
    /// Zero unless the solver is broken.
    pub infeasible_accepted: usize,
    /// Accepted steps that did not strictly decrease the objective.
    pub nonmonotone_accepted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// Last accepted iterate; strictly feasible whenever `entered_interior`.
    pub x: Vector,
    pub objective: f64,
    pub diagnostics: Option<CentralityDiagnostics>,
    pub iterations: usize,
    pub restarts: usize,
    pub termination: Termination,
    pub final_beta: f64,
    pub entered_interior: bool,
    pub stats: SolveStats,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

impl SolveResult {
    pub fn objective_error(&self, reference: f64) -> f64 {
        objective_error(self.objective, reference)
    }
}

/// `α = β / |s|`, so that `|α s| = β`.
pub fn fixed_length_step(beta: f64, s: &Vector) -> Result<f64> {
    let ns = s.norm();
    if ns == 0.0 || !ns.is_finite() {
        return Err(Error::ZeroDirection);
    }
    Ok(beta / ns)
}

/// Restart test on periodically sampled objective values: restart when the
/// latest sample exceeds the previous one, or when the relative decrease
/// between them is below `slowdown_tol`.
pub fn restart_check(history: &[f64], slowdown_tol: f64) -> bool {
    let [.., prev, latest] = history else {
        return false;
    };
    if latest > prev {
        return true;
    }
    (prev - latest) / prev.abs().max(f64::MIN_POSITIVE) < slowdown_tol
}

/// `|f_ref - f_found| / (1 + |f_ref|)`
pub fn objective_error(found: f64, reference: f64) -> f64 {
    (reference - found).abs() / (1.0 + reference.abs())
}

/// Search direction at `x`, with the barrier value folded into the diagnostics.
pub(crate) fn direction_at<P: BarrierProblem + ?Sized>(
    problem: &P,
    x: &Vector,
    interior: bool,
    config: &SolverConfig,
    projector: Option<&EqualityProjector>,
) -> Result<DirectionOutput> {
    let grad_f = problem.objective_gradient(x);
    let (phi, grad_phi) = if interior {
        let (phi, g) = problem.barrier(x)?;
        (Some(phi), g)
    } else {
        let g = problem
            .exterior_constraint_gradient(x)
            .ok_or(Error::InfeasibleStart { index: 0, value: f64::NAN })?;
        (None, g)
    };
    let mut out = match projector {
        Some(p) => projected_gdam_direction_with_tol(&grad_f, &grad_phi, config.zeta, p, config.barrier_zero_rtol)?,
        None => gdam_direction_with_tol(&grad_f, &grad_phi, config.zeta, config.barrier_zero_rtol)?,
    };
    out.diagnostics.barrier_value = phi;
    Ok(out)
}

/// Centrality diagnostics at an interior point.
pub fn diagnostics_at<P: BarrierProblem + ?Sized>(
    problem: &P,
    x: &Vector,
    zeta: f64,
    projector: Option<&EqualityProjector>,
) -> Option<CentralityDiagnostics> {
    let (phi, grad_phi) = problem.barrier(x).ok()?;
    let mut grad_f = problem.objective_gradient(x);
    let mut grad_phi = grad_phi;
    if let Some(p) = projector {
        grad_f = p.project(&grad_f);
        grad_phi = p.project(&grad_phi);
    }
    let mut d = centrality_with_tol(&grad_f, &grad_phi, zeta, BARRIER_ZERO_RTOL).ok()?;
    d.barrier_value = Some(phi);
    Some(d)
}

pub(crate) fn build_projector<P: BarrierProblem + ?Sized>(problem: &P) -> Result<Option<EqualityProjector>> {
    problem
        .equality()
        .filter(|eq| eq.a.nrows() > 0)
        .map(|eq| EqualityProjector::new(&eq.a))
        .transpose()
}

/// Initial checks shared by both schemes. Returns whether `x0` is interior.
pub(crate) fn check_start<P: BarrierProblem + ?Sized>(
    problem: &P,
    config: &SolverConfig,
    x0: &Vector,
) -> Result<bool> {
    config.validate()?;
    if x0.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: x0.len(),
        });
    }
    let interior = problem.is_strictly_interior(x0);
    if !interior && !(config.exterior_start && problem.exterior_constraint_gradient(x0).is_some()) {
        return Err(Error::InfeasibleStart {
            index: 0,
            value: problem.max_constraint(x0).unwrap_or(f64::NAN),
        });
    }
    Ok(interior)
}

/// Independent interior check for accepted iterates.
pub(crate) fn audit_interior<P: BarrierProblem + ?Sized>(problem: &P, x: &Vector) -> bool {
    match problem.max_constraint(x) {
        Some(g) => g < 0.0,
        None => problem.barrier(x).is_ok(),
    }
}

pub(crate) struct Recorder {
    points: Option<Vec<TrajectoryPoint>>,
    stride: usize,
    zeta: f64,
}

impl Recorder {
    pub(crate) fn new(config: &SolverConfig, dim: usize) -> Self {
        Self {
            points: config.record_trajectory.then(Vec::new),
            stride: config.stride(dim),
            zeta: config.zeta,
        }
    }

    pub(crate) fn record<P: BarrierProblem + ?Sized>(
        &mut self,
        problem: &P,
        projector: Option<&EqualityProjector>,
        k: usize,
        x: &Vector,
        f: f64,
        beta: f64,
        force: bool,
    ) {
        let Some(points) = self.points.as_mut() else {
            return;
        };
        if !force && k % self.stride != 0 {
            return;
        }
        if points.last().is_some_and(|p| p.k == k) {
            return;
        }
        let diag = diagnostics_at(problem, x, self.zeta, projector);
        points.push(TrajectoryPoint {
            k,
            x: x.iter().copied().collect(),
            f,
            max_g: problem.max_constraint(x),
            cos_theta: diag.and_then(|d| d.cos_theta),
            residual: diag.and_then(|d| d.residual),
            beta,
        });
    }

    pub(crate) fn finish(self) -> Option<Vec<TrajectoryPoint>> {
        self.points
    }
}
