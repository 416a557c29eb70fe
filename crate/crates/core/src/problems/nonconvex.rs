use crate::barrier::{Problem, Vector};

/// `f = 1.5x₁² + x₂² - 2x₁x₂ + 2x₁³ + 0.5x₁⁴` subject to `x₁² - x₂ - 2.2 <= 0`.
///
/// `f` has critical points on the diagonal `x₁ = x₂` at `0`, `(-3 + √7)/2`
/// and `(-3 - √7)/2`; the origin and the last one are local minima.
#[derive(Debug, Clone, Copy, Default)]
pub struct NonconvexProblem;

pub fn nonconvex_2d_problem() -> NonconvexProblem {
    NonconvexProblem
}

impl NonconvexProblem {
    pub fn critical_points() -> [[f64; 2]; 3] {
        let r = 7f64.sqrt();
        let a = (-3.0 + r) / 2.0;
        let b = (-3.0 - r) / 2.0;
        [[0.0, 0.0], [a, a], [b, b]]
    }
}

impl Problem for NonconvexProblem {
    fn dim(&self) -> usize {
        2
    }

    fn num_constraints(&self) -> usize {
        1
    }

    fn objective(&self, x: &Vector) -> f64 {
        let (a, b) = (x[0], x[1]);
        1.5 * a * a + b * b - 2.0 * a * b + 2.0 * a.powi(3) + 0.5 * a.powi(4)
    }

    fn objective_gradient(&self, x: &Vector) -> Vector {
        let (a, b) = (x[0], x[1]);
        Vector::from_vec(vec![
            3.0 * a - 2.0 * b + 6.0 * a * a + 2.0 * a.powi(3),
            2.0 * b - 2.0 * a,
        ])
    }

    fn constraint(&self, _i: usize, x: &Vector) -> f64 {
        x[0] * x[0] - x[1] - 2.2
    }

    fn add_constraint_gradient(&self, _i: usize, x: &Vector, weight: f64, out: &mut Vector) {
        out[0] += weight * 2.0 * x[0];
        out[1] -= weight;
    }
}
