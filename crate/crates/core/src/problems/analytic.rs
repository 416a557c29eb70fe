use serde::{Deserialize, Serialize};

use crate::barrier::{Problem, Vector};
use crate::error::{Error, Result};

/// `min ½|x|²  s.t.  10 - x₂ <= 0`, with KKT point `(0, 10)` and `f★ = 50`.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyticProblem;

pub fn analytic_2d_problem() -> AnalyticProblem {
    AnalyticProblem
}

impl AnalyticProblem {
    pub const KKT_POINT: [f64; 2] = [0.0, 10.0];
    pub const OPTIMUM: f64 = 50.0;
}

impl Problem for AnalyticProblem {
    fn dim(&self) -> usize {
        2
    }

    fn num_constraints(&self) -> usize {
        1
    }

    fn objective(&self, x: &Vector) -> f64 {
        0.5 * x.norm_squared()
    }

    fn objective_gradient(&self, x: &Vector) -> Vector {
        x.clone()
    }

    fn constraint(&self, _i: usize, x: &Vector) -> f64 {
        10.0 - x[1]
    }

    fn add_constraint_gradient(&self, _i: usize, _x: &Vector, weight: f64, out: &mut Vector) {
        out[1] -= weight;
    }

    fn reference_optimum(&self) -> Option<f64> {
        Some(Self::OPTIMUM)
    }
}

/// Closed-form trajectory of the direction field on [`AnalyticProblem`]:
///
/// ```text
/// x₂ + √(x₁² + x₂²) = 2 x̄₂ |x₁ / x₁⁰|^(1-ζ),    x̄₂ = ½(x₂⁰ + |x⁰|)
/// ```
///
/// The field `-x/|x| + ζ e₂` does not depend on which side of the constraint
/// the point lies, so the curve holds from infeasible starts as well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticTrajectory {
    pub zeta: f64,
    pub x0: [f64; 2],
    pub xbar2: f64,
}

impl AnalyticTrajectory {
    pub fn new(zeta: f64, x0: [f64; 2]) -> Result<Self> {
        if x0[0] == 0.0 {
            return Err(Error::Domain("trajectory needs x1 != 0 at the start".into()));
        }
        if !(0.0..=1.0).contains(&zeta) {
            return Err(Error::Domain(format!("zeta = {zeta} outside [0, 1]")));
        }
        let xbar2 = 0.5 * (x0[1] + x0[0].hypot(x0[1]));
        Ok(Self { zeta, x0, xbar2 })
    }

    fn radius_sum(&self, x1: f64) -> f64 {
        2.0 * self.xbar2 * (x1 / self.x0[0]).abs().powf(1.0 - self.zeta)
    }

    /// Signed defect of `point` with respect to the curve.
    pub fn defect(&self, point: [f64; 2]) -> f64 {
        point[1] + point[0].hypot(point[1]) - self.radius_sum(point[0])
    }

    /// The point of the curve above `x1`.
    pub fn x2_at(&self, x1: f64) -> f64 {
        let r = self.radius_sum(x1);
        (r * r - x1 * x1) / (2.0 * r)
    }

    /// `(x̄₂/ζ)√(1-ζ²)`: the bound on `|x♯ - (0, 10)|` for boundary hits.
    pub fn apex_x1_bound(&self) -> f64 {
        self.xbar2 / self.zeta * (1.0 - self.zeta * self.zeta).sqrt()
    }
}

/// `x₂ + |x| - 2x̄₂|x₁/x₁⁰|^(1-ζ)`; zero on the exact trajectory.
pub fn trajectory_defect(traj: &AnalyticTrajectory, point: [f64; 2]) -> f64 {
    traj.defect(point)
}

/// Highest point of the trajectory, where the `x₂` component of the field
/// vanishes: `x₂ = ζ |x|`.
///
/// `x₂` follows the closed form
/// `x₂^ζ = 2ζ/(1+ζ) · x̄₂/|x₁⁰|^(1-ζ) · (√(1-ζ²)/ζ)^(1-ζ)` and
/// `|x₁| = (x₂/ζ)√(1-ζ²)`, which is at most
/// [`AnalyticTrajectory::apex_x1_bound`] because `x₂ <= x̄₂` there.
pub fn trajectory_apex(zeta: f64, x0: [f64; 2]) -> Result<[f64; 2]> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::Domain(format!("apex needs zeta in (0, 1), got {zeta}")));
    }
    let traj = AnalyticTrajectory::new(zeta, x0)?;
    let root = (1.0 - zeta * zeta).sqrt();
    let rhs = 2.0 * zeta / (1.0 + zeta) * traj.xbar2 / x0[0].abs().powf(1.0 - zeta) * (root / zeta).powf(1.0 - zeta);
    let x2 = rhs.powf(1.0 / zeta);
    let x1 = x0[0].signum() * x2 / zeta * root;
    Ok([x1, x2])
}
