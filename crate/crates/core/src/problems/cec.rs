//! Inequality-constrained problems from the CEC 2006 constrained benchmark.
//! Bounds enter as ordinary inequalities `l_i - x_i <= 0`, `x_i - u_i <= 0`,
//! placed after the problem's own constraints.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::barrier::{BarrierProblem, Problem, Vector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CecId {
    G01,
    G04,
    G06,
    G08,
    G24,
}

impl CecId {
    pub const ALL: [CecId; 5] = [CecId::G01, CecId::G04, CecId::G06, CecId::G08, CecId::G24];

    /// Published vanilla-GDAM run at `ζ = 0.98` for this problem.
    pub fn reference_settings(self) -> ReferenceSettings {
        let (beta, iterations, reference, found, error) = match self {
            CecId::G01 => (0.002, 2362, -15.0, -14.7215, 1.74e-2),
            CecId::G04 => (0.2, 136, -3.0665e4, -3.0657e4, 2.61e-4),
            CecId::G06 => (0.002, 4826, -6.9618e3, -6.8371e3, 1.79e-2),
            CecId::G08 => (0.01, 66, -9.5825e-2, -9.5063e-2, 6.95e-4),
            CecId::G24 => (0.02, 268, -5.5080, -5.4147, 1.43e-2),
        };
        ReferenceSettings {
            zeta: 0.98,
            beta,
            iterations,
            reference,
            found,
            error,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CecId::G01 => "G01",
            CecId::G04 => "G04",
            CecId::G06 => "G06",
            CecId::G08 => "G08",
            CecId::G24 => "G24",
        }
    }
}

impl fmt::Display for CecId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CecId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CecId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownProblemId(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSettings {
    pub zeta: f64,
    pub beta: f64,
    pub iterations: usize,
    pub reference: f64,
    pub found: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CecProblem {
    pub id: CecId,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

pub fn cec_problem(id: &str) -> Result<CecProblem> {
    Ok(CecProblem::new(id.parse()?))
}

const G01_LINEAR: [(&[(usize, f64)], f64); 9] = [
    (&[(0, 2.0), (1, 2.0), (9, 1.0), (10, 1.0)], -10.0),
    (&[(0, 2.0), (2, 2.0), (9, 1.0), (11, 1.0)], -10.0),
    (&[(1, 2.0), (2, 2.0), (10, 1.0), (11, 1.0)], -10.0),
    (&[(0, -8.0), (9, 1.0)], 0.0),
    (&[(1, -8.0), (10, 1.0)], 0.0),
    (&[(2, -8.0), (11, 1.0)], 0.0),
    (&[(3, -2.0), (4, -1.0), (9, 1.0)], 0.0),
    (&[(5, -2.0), (6, -1.0), (10, 1.0)], 0.0),
    (&[(7, -2.0), (8, -1.0), (11, 1.0)], 0.0),
];

fn g04_parts(x: &Vector) -> [f64; 3] {
    [
        85.334407 + 0.0056858 * x[1] * x[4] + 0.0006262 * x[0] * x[3] - 0.0022053 * x[2] * x[4],
        80.51249 + 0.0071317 * x[1] * x[4] + 0.0029955 * x[0] * x[1] + 0.0021813 * x[2] * x[2],
        9.300961 + 0.0047026 * x[2] * x[4] + 0.0012547 * x[0] * x[2] + 0.0019085 * x[2] * x[3],
    ]
}

fn g04_part_gradient(k: usize, x: &Vector) -> [f64; 5] {
    match k {
        0 => [
            0.0006262 * x[3],
            0.0056858 * x[4],
            -0.0022053 * x[4],
            0.0006262 * x[0],
            0.0056858 * x[1] - 0.0022053 * x[2],
        ],
        1 => [
            0.0029955 * x[1],
            0.0071317 * x[4] + 0.0029955 * x[0],
            2.0 * 0.0021813 * x[2],
            0.0,
            0.0071317 * x[1],
        ],
        _ => [
            0.0012547 * x[2],
            0.0,
            0.0047026 * x[4] + 0.0012547 * x[0] + 0.0019085 * x[3],
            0.0019085 * x[2],
            0.0047026 * x[2],
        ],
    }
}

// (upper, lower) limits on the three G04 expressions
const G04_LIMITS: [(f64, f64); 3] = [(92.0, 0.0), (110.0, 90.0), (25.0, 20.0)];

impl CecProblem {
    pub fn new(id: CecId) -> Self {
        let (lower, upper) = match id {
            CecId::G01 => {
                let mut u = vec![1.0; 13];
                u[9] = 100.0;
                u[10] = 100.0;
                u[11] = 100.0;
                (vec![0.0; 13], u)
            }
            CecId::G04 => (vec![78.0, 33.0, 27.0, 27.0, 27.0], vec![102.0, 45.0, 45.0, 45.0, 45.0]),
            CecId::G06 => (vec![13.0, 0.0], vec![100.0, 100.0]),
            CecId::G08 => (vec![0.0, 0.0], vec![10.0, 10.0]),
            CecId::G24 => (vec![0.0, 0.0], vec![3.0, 4.0]),
        };
        Self { id, lower, upper }
    }

    fn inner_count(&self) -> usize {
        match self.id {
            CecId::G01 => 9,
            CecId::G04 => 6,
            CecId::G06 | CecId::G08 | CecId::G24 => 2,
        }
    }

    /// Box used to draw starting points. G24's feasible set has two pieces
    /// that touch only at `x₁ = 1`; starts are drawn from the one holding the
    /// optimum. For G01 the box is cut to `x₁₀..x₁₂ <= 3`, which every
    /// feasible point satisfies.
    pub fn start_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self.id {
            CecId::G01 => {
                let mut u = self.upper.clone();
                u[9..12].fill(3.0);
                (self.lower.clone(), u)
            }
            CecId::G24 => (vec![1.05, 0.0], self.upper.clone()),
            _ => (self.lower.clone(), self.upper.clone()),
        }
    }

    /// Uniform draw from [`Self::start_box`], rejected until strictly feasible
    /// and at least `min_error` away from the reference optimum in objective
    /// error.
    pub fn sample_start<R: Rng>(&self, rng: &mut R, min_error: f64, max_tries: usize) -> Result<Vector> {
        let (lo, hi) = self.start_box();
        let reference = self.id.reference_settings().reference;
        for _ in 0..max_tries {
            let x = Vector::from_iterator(lo.len(), lo.iter().zip(&hi).map(|(&l, &u)| rng.random_range(l..u)));
            if BarrierProblem::is_strictly_interior(self, &x)
                && crate::solver::objective_error(Problem::objective(self, &x), reference) >= min_error
            {
                return Ok(x);
            }
        }
        Err(Error::NoInteriorPoint(format!("{}: no admissible start in {max_tries} draws", self.id)))
    }
}

impl Problem for CecProblem {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn num_constraints(&self) -> usize {
        self.inner_count() + 2 * self.lower.len()
    }

    fn objective(&self, x: &Vector) -> f64 {
        match self.id {
            CecId::G01 => {
                let head: f64 = (0..4).map(|i| 5.0 * x[i] - 5.0 * x[i] * x[i]).sum();
                head - (4..13).map(|i| x[i]).sum::<f64>()
            }
            CecId::G04 => {
                5.3578547 * x[2] * x[2] + 0.8356891 * x[0] * x[4] + 37.293239 * x[0] - 40792.141
            }
            CecId::G06 => (x[0] - 10.0).powi(3) + (x[1] - 20.0).powi(3),
            CecId::G08 => {
                let num = (2.0 * PI * x[0]).sin().powi(3) * (2.0 * PI * x[1]).sin();
                -num / (x[0].powi(3) * (x[0] + x[1]))
            }
            CecId::G24 => -x[0] - x[1],
        }
    }

    fn objective_gradient(&self, x: &Vector) -> Vector {
        let mut g = Vector::zeros(self.lower.len());
        match self.id {
            CecId::G01 => {
                for i in 0..4 {
                    g[i] = 5.0 - 10.0 * x[i];
                }
                for i in 4..13 {
                    g[i] = -1.0;
                }
            }
            CecId::G04 => {
                g[0] = 0.8356891 * x[4] + 37.293239;
                g[2] = 2.0 * 5.3578547 * x[2];
                g[4] = 0.8356891 * x[0];
            }
            CecId::G06 => {
                g[0] = 3.0 * (x[0] - 10.0).powi(2);
                g[1] = 3.0 * (x[1] - 20.0).powi(2);
            }
            CecId::G08 => {
                let w = 2.0 * PI;
                let (s1, c1) = (w * x[0]).sin_cos();
                let (s2, c2) = (w * x[1]).sin_cos();
                let num = s1.powi(3) * s2;
                let den = x[0].powi(3) * (x[0] + x[1]);
                let dnum = [3.0 * s1 * s1 * c1 * w * s2, s1.powi(3) * c2 * w];
                let dden = [4.0 * x[0].powi(3) + 3.0 * x[0] * x[0] * x[1], x[0].powi(3)];
                for k in 0..2 {
                    g[k] = -(dnum[k] * den - num * dden[k]) / (den * den);
                }
            }
            CecId::G24 => {
                g[0] = -1.0;
                g[1] = -1.0;
            }
        }
        g
    }

    fn constraint(&self, i: usize, x: &Vector) -> f64 {
        let k = self.inner_count();
        if i >= k {
            let j = (i - k) / 2;
            return if (i - k) % 2 == 0 { self.lower[j] - x[j] } else { x[j] - self.upper[j] };
        }
        match self.id {
            CecId::G01 => {
                let (terms, c) = G01_LINEAR[i];
                terms.iter().map(|&(j, a)| a * x[j]).sum::<f64>() + c
            }
            CecId::G04 => {
                let e = g04_parts(x)[i / 2];
                let (hi, lo) = G04_LIMITS[i / 2];
                if i % 2 == 0 {
                    e - hi
                } else {
                    lo - e
                }
            }
            CecId::G06 => match i {
                0 => -(x[0] - 5.0).powi(2) - (x[1] - 5.0).powi(2) + 100.0,
                _ => (x[0] - 6.0).powi(2) + (x[1] - 5.0).powi(2) - 82.81,
            },
            CecId::G08 => match i {
                0 => x[0] * x[0] - x[1] + 1.0,
                _ => 1.0 - x[0] + (x[1] - 4.0).powi(2),
            },
            CecId::G24 => {
                let a = x[0];
                match i {
                    0 => -2.0 * a.powi(4) + 8.0 * a.powi(3) - 8.0 * a * a + x[1] - 2.0,
                    _ => -4.0 * a.powi(4) + 32.0 * a.powi(3) - 88.0 * a * a + 96.0 * a + x[1] - 36.0,
                }
            }
        }
    }

    fn add_constraint_gradient(&self, i: usize, x: &Vector, w: f64, out: &mut Vector) {
        let k = self.inner_count();
        if i >= k {
            let j = (i - k) / 2;
            out[j] += if (i - k) % 2 == 0 { -w } else { w };
            return;
        }
        match self.id {
            CecId::G01 => {
                for &(j, a) in G01_LINEAR[i].0 {
                    out[j] += w * a;
                }
            }
            CecId::G04 => {
                let sign = if i % 2 == 0 { w } else { -w };
                for (j, d) in g04_part_gradient(i / 2, x).into_iter().enumerate() {
                    out[j] += sign * d;
                }
            }
            CecId::G06 => {
                let (c, s) = if i == 0 { (5.0, -2.0) } else { (6.0, 2.0) };
                out[0] += w * s * (x[0] - c);
                out[1] += w * s * (x[1] - 5.0);
            }
            CecId::G08 => {
                if i == 0 {
                    out[0] += w * 2.0 * x[0];
                    out[1] -= w;
                } else {
                    out[0] -= w;
                    out[1] += w * 2.0 * (x[1] - 4.0);
                }
            }
            CecId::G24 => {
                let a = x[0];
                out[0] += w * if i == 0 {
                    -8.0 * a.powi(3) + 24.0 * a * a - 16.0 * a
                } else {
                    -16.0 * a.powi(3) + 96.0 * a * a - 176.0 * a + 96.0
                };
                out[1] += w;
            }
        }
    }

    fn reference_optimum(&self) -> Option<f64> {
        Some(self.id.reference_settings().reference)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::objective_error;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn parse_ids() {
        assert_eq!("g04".parse::<CecId>().unwrap(), CecId::G04);
        assert!(matches!("G12".parse::<CecId>(), Err(Error::UnknownProblemId(_))));
    }

    #[test]
    fn reference_values() {
        assert_eq!(Problem::reference_optimum(&cec_problem("G08").unwrap()), Some(-9.5825e-2));
        assert_eq!(Problem::reference_optimum(&cec_problem("G24").unwrap()), Some(-5.5080));
        assert_eq!(Problem::reference_optimum(&cec_problem("G06").unwrap()), Some(-6.9618e3));
        for id in CecId::ALL {
            let row = id.reference_settings();
            let e = objective_error(row.found, row.reference);
            assert!((e - row.error).abs() <= 0.01 * row.error, "{id}: {e} vs {}", row.error);
        }
    }

    // best-known solutions from the benchmark report
    #[test]
    fn known_optima_are_feasible_with_expected_values() {
        let cases: [(CecId, Vec<f64>, f64); 5] = [
            (
                CecId::G01,
                vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 1.0],
                -15.0,
            ),
            (
                CecId::G04,
                vec![78.0, 33.0, 29.9952560256815985, 45.0, 36.7758129057882073],
                -30665.538671783317,
            ),
            (CecId::G06, vec![14.09500000000000064, 0.8429607892154795668], -6961.81387558015),
            (CecId::G08, vec![1.227971352975, 4.245373366235], -0.0958250414180359),
            (CecId::G24, vec![2.329520197477, 3.178493074072], -5.50801327159536),
        ];
        for (id, x, f) in cases {
            let p = CecProblem::new(id);
            let x = v(&x);
            assert!((Problem::objective(&p, &x) - f).abs() <= 1e-6 * (1.0 + f.abs()), "{id}");
            let worst = BarrierProblem::max_constraint(&p, &x).unwrap();
            assert!(worst <= 1e-6, "{id}: max g = {worst}");
        }
    }

    #[test]
    fn sampled_starts_are_interior() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for id in CecId::ALL {
            let p = CecProblem::new(id);
            let x = p.sample_start(&mut rng, 0.0, 1_000_000).unwrap();
            assert!(BarrierProblem::is_strictly_interior(&p, &x));
        }
    }
}
