//! Problem model, the logarithmic barrier `Φ(x) = -Σ log(-g_i(x))`, feasibility
//! classification and the centrality diagnostics shared by every solver.
//!
//! Two traits describe problems. [`Problem`] is the oracle bundle a user
//! writes: an objective, `m` inequality constraints `g_i(x) <= 0` and an
//! optional equality block. [`BarrierProblem`] is what the solvers consume: an
//! objective plus a barrier whose gradient exists only strictly inside the
//! feasible set. Every [`Problem`] is a [`BarrierProblem`] through the
//! logarithmic barrier; the semidefinite dual in [`crate::snl`] implements
//! [`BarrierProblem`] directly with `-log det S`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::LinearEqualities;

pub type Vector = DVector<f64>;

/// Relative threshold under which `|∇Φ|` counts as zero: `|∇Φ| <= tol * max(1, |∇f|)`.
pub const BARRIER_ZERO_RTOL: f64 = 1e-14;

/// Default tolerance used by oracle guards when classifying boundary points.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Differentiable objective and inequality constraints `g_i(x) <= 0`.
///
/// Oracles must be reentrant and free of side effects.
pub trait Problem {
    fn dim(&self) -> usize;

    fn num_constraints(&self) -> usize;

    fn objective(&self, x: &Vector) -> f64;

    fn objective_gradient(&self, x: &Vector) -> Vector;

    fn constraint(&self, i: usize, x: &Vector) -> f64;

    /// Adds `weight * ∇g_i(x)` to `out`.
    fn add_constraint_gradient(&self, i: usize, x: &Vector, weight: f64, out: &mut Vector);

    fn constraint_gradient(&self, i: usize, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        self.add_constraint_gradient(i, x, 1.0, &mut out);
        out
    }

    /// Linear equalities `A x = b`, if any.
    fn equality(&self) -> Option<&LinearEqualities> {
        None
    }

    /// Known optimal objective value, used only for error reporting.
    fn reference_optimum(&self) -> Option<f64> {
        None
    }
}

/// What the interior-point solvers need from a problem.
pub trait BarrierProblem {
    fn dim(&self) -> usize;

    fn objective(&self, x: &Vector) -> f64;

    fn objective_gradient(&self, x: &Vector) -> Vector;

    /// Barrier value and gradient. Fails outside the strict interior.
    fn barrier(&self, x: &Vector) -> Result<(f64, Vector)>;

    /// Strict interior test for trial points. May stop at the first violation.
    fn is_strictly_interior(&self, x: &Vector) -> bool;

    /// `max_i g_i(x)` when the constraints are explicit.
    fn max_constraint(&self, _x: &Vector) -> Option<f64> {
        None
    }

    /// Constraint gradient usable outside the feasible set.
    ///
    /// Only single-constraint problems have one: there `∇g / |∇g|` coincides
    /// with the normalized barrier gradient inside the feasible set.
    fn exterior_constraint_gradient(&self, _x: &Vector) -> Option<Vector> {
        None
    }

    fn equality(&self) -> Option<&LinearEqualities> {
        None
    }

    fn reference_optimum(&self) -> Option<f64> {
        None
    }
}

impl<P: Problem + ?Sized> BarrierProblem for P {
    fn dim(&self) -> usize {
        Problem::dim(self)
    }

    fn objective(&self, x: &Vector) -> f64 {
        Problem::objective(self, x)
    }

    fn objective_gradient(&self, x: &Vector) -> Vector {
        Problem::objective_gradient(self, x)
    }

    fn barrier(&self, x: &Vector) -> Result<(f64, Vector)> {
        barrier_value_and_gradient(self, x)
    }

    fn is_strictly_interior(&self, x: &Vector) -> bool {
        (0..self.num_constraints()).all(|i| self.constraint(i, x) < 0.0)
    }

    fn max_constraint(&self, x: &Vector) -> Option<f64> {
        (0..self.num_constraints())
            .map(|i| self.constraint(i, x))
            .reduce(f64::max)
    }

    fn exterior_constraint_gradient(&self, x: &Vector) -> Option<Vector> {
        (self.num_constraints() == 1).then(|| self.constraint_gradient(0, x))
    }

    fn equality(&self) -> Option<&LinearEqualities> {
        Problem::equality(self)
    }

    fn reference_optimum(&self) -> Option<f64> {
        Problem::reference_optimum(self)
    }
}

/// `Φ(x) = -Σ log(-g_i(x))`; zero when there are no constraints.
pub fn barrier_value<P: Problem + ?Sized>(problem: &P, x: &Vector) -> Result<f64> {
    let mut phi = 0.0;
    for i in 0..problem.num_constraints() {
        let g = problem.constraint(i, x);
        if !(g < 0.0) {
            return Err(Error::BoundaryViolation { index: i, value: g });
        }
        phi -= (-g).ln();
    }
    Ok(phi)
}

/// `∇Φ(x) = Σ ∇g_i(x) / (-g_i(x))`.
pub fn barrier_gradient<P: Problem + ?Sized>(problem: &P, x: &Vector) -> Result<Vector> {
    barrier_value_and_gradient(problem, x).map(|(_, g)| g)
}

/// Barrier value and gradient in a single pass over the constraints.
pub fn barrier_value_and_gradient<P: Problem + ?Sized>(
    problem: &P,
    x: &Vector,
) -> Result<(f64, Vector)> {
    let m = problem.num_constraints();
    let mut values = Vec::with_capacity(m);
    for i in 0..m {
        let g = problem.constraint(i, x);
        if !(g < 0.0) {
            return Err(Error::BoundaryViolation { index: i, value: g });
        }
        values.push(g);
    }
    let mut grad = Vector::zeros(problem.dim());
    let mut phi = 0.0;
    for (i, g) in values.into_iter().enumerate() {
        phi -= (-g).ln();
        problem.add_constraint_gradient(i, x, 1.0 / (-g), &mut grad);
    }
    Ok((phi, grad))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeasibilityClass {
    StrictlyInterior,
    OnBoundary,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityStatus {
    pub class: FeasibilityClass,
    /// Lowest index attaining `max_i g_i(x)`; `None` without constraints.
    pub worst_index: Option<usize>,
    pub worst_value: f64,
}

pub fn classify_feasibility<P: Problem + ?Sized>(
    problem: &P,
    x: &Vector,
    boundary_tol: f64,
) -> FeasibilityStatus {
    let mut worst_index = None;
    let mut worst_value = f64::NEG_INFINITY;
    for i in 0..problem.num_constraints() {
        let g = problem.constraint(i, x);
        if g > worst_value || worst_index.is_none() {
            worst_value = g;
            worst_index = Some(i);
        }
    }
    let class = if worst_value < -boundary_tol {
        FeasibilityClass::StrictlyInterior
    } else if worst_value.abs() <= boundary_tol {
        FeasibilityClass::OnBoundary
    } else {
        FeasibilityClass::Infeasible
    };
    FeasibilityStatus {
        class,
        worst_index,
        worst_value,
    }
}

/// Centrality of a point measured by the angle between `∇f` and `∇Φ`.
///
/// On the central path `cos θ = -1` and the residual vanishes. Both are `None`
/// when the barrier gradient is zero, in which case `eta` is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralityDiagnostics {
    pub cos_theta: Option<f64>,
    /// `ε = |∇f/|∇f| + ∇Φ/|∇Φ||`.
    pub residual: Option<f64>,
    pub barrier_value: Option<f64>,
    /// Dynamic barrier parameter `ζ |∇f| / |∇Φ|`.
    pub eta: f64,
}

pub fn centrality(grad_f: &Vector, grad_phi: &Vector, zeta: f64) -> Result<CentralityDiagnostics> {
    centrality_with_tol(grad_f, grad_phi, zeta, BARRIER_ZERO_RTOL)
}

pub fn centrality_with_tol(
    grad_f: &Vector,
    grad_phi: &Vector,
    zeta: f64,
    zero_rtol: f64,
) -> Result<CentralityDiagnostics> {
    let nf = grad_f.norm();
    if nf == 0.0 {
        return Err(Error::DegenerateObjectiveGradient);
    }
    let np = grad_phi.norm();
    if barrier_gradient_vanishes(nf, np, zero_rtol) {
        return Ok(CentralityDiagnostics {
            cos_theta: None,
            residual: None,
            barrier_value: None,
            eta: f64::INFINITY,
        });
    }
    let cos_theta = (grad_f.dot(grad_phi) / (nf * np)).clamp(-1.0, 1.0);
    let residual = (grad_f / nf + grad_phi / np).norm();
    Ok(CentralityDiagnostics {
        cos_theta: Some(cos_theta),
        residual: Some(residual),
        barrier_value: None,
        eta: zeta * nf / np,
    })
}

pub(crate) fn barrier_gradient_vanishes(norm_f: f64, norm_phi: f64, zero_rtol: f64) -> bool {
    norm_phi <= zero_rtol * norm_f.max(1.0)
}

/// A [`Problem`] assembled from closures; handy for small examples and tests.
pub struct FnProblem<F, GF, G, GG> {
    pub dim: usize,
    pub num_constraints: usize,
    pub f: F,
    pub grad_f: GF,
    pub g: G,
    pub grad_g: GG,
    pub reference: Option<f64>,
}

impl<F, GF, G, GG> Problem for FnProblem<F, GF, G, GG>
where
    F: Fn(&Vector) -> f64,
    GF: Fn(&Vector) -> Vector,
    G: Fn(usize, &Vector) -> f64,
    GG: Fn(usize, &Vector) -> Vector,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn num_constraints(&self) -> usize {
        self.num_constraints
    }

    fn objective(&self, x: &Vector) -> f64 {
        (self.f)(x)
    }

    fn objective_gradient(&self, x: &Vector) -> Vector {
        (self.grad_f)(x)
    }

    fn constraint(&self, i: usize, x: &Vector) -> f64 {
        (self.g)(i, x)
    }

    fn add_constraint_gradient(&self, i: usize, x: &Vector, weight: f64, out: &mut Vector) {
        out.axpy(weight, &(self.grad_g)(i, x), 1.0);
    }

    fn reference_optimum(&self) -> Option<f64> {
        self.reference
    }
}
