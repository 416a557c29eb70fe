use serde::{Deserialize, Serialize};

use super::instance::{Point, SnlInstance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    pub max_iters: usize,
    /// Stop once `|∇F| <= tol · (1 + F)`.
    pub tol: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            tol: 1e-8,
        }
    }
}

/// `F(X) = Σ (|x_i - x_j|² - d_ij²)² + Σ (|a_k - x_j|² - d_kj²)²`.
pub fn nls_objective(inst: &SnlInstance, x: &[Point]) -> f64 {
    nls_value_and_gradient(inst, x, false).0
}

pub fn nls_value_and_gradient(inst: &SnlInstance, x: &[Point], with_grad: bool) -> (f64, Vec<Point>) {
    let mut f = 0.0;
    let mut g = if with_grad { vec![[0.0; 2]; x.len()] } else { Vec::new() };
    for e in &inst.edges_ss {
        let dx = [x[e.i][0] - x[e.j][0], x[e.i][1] - x[e.j][1]];
        let r = dx[0] * dx[0] + dx[1] * dx[1] - e.d * e.d;
        f += r * r;
        if with_grad {
            for c in 0..2 {
                g[e.i][c] += 4.0 * r * dx[c];
                g[e.j][c] -= 4.0 * r * dx[c];
            }
        }
    }
    for e in &inst.edges_sa {
        let a = inst.anchors[e.k];
        let dx = [x[e.j][0] - a[0], x[e.j][1] - a[1]];
        let r = dx[0] * dx[0] + dx[1] * dx[1] - e.d * e.d;
        f += r * r;
        if with_grad {
            for c in 0..2 {
                g[e.j][c] += 4.0 * r * dx[c];
            }
        }
    }
    (f, g)
}

/// Gradient descent with Armijo backtracking on the least-squares fit of
/// squared distances. The trial step starts from the Barzilai–Borwein length
/// of the previous iteration.
pub fn refine_positions(inst: &SnlInstance, x0: &[Point], opts: &RefineOptions) -> Vec<Point> {
    let mut x = x0.to_vec();
    let (mut f, mut g) = nls_value_and_gradient(inst, &x, true);
    let norm2 = |g: &[Point]| g.iter().map(|p| p[0] * p[0] + p[1] * p[1]).sum::<f64>();
    let mut t = 1e-3;
    for _ in 0..opts.max_iters {
        let g2 = norm2(&g);
        if g2.sqrt() <= opts.tol * (1.0 + f) {
            break;
        }
        let mut accepted = None;
        while t > 1e-20 {
            let trial: Vec<Point> = x.iter().zip(&g).map(|(p, d)| [p[0] - t * d[0], p[1] - t * d[1]]).collect();
            let ft = nls_objective(inst, &trial);
            if ft <= f - 1e-4 * t * g2 {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew)) = accepted else { break };
        let (_, gn) = nls_value_and_gradient(inst, &xn, true);
        // Barzilai–Borwein length s·s / s·y for the next trial
        let (mut ss, mut sy) = (0.0, 0.0);
        for i in 0..x.len() {
            for c in 0..2 {
                let s = xn[i][c] - x[i][c];
                ss += s * s;
                sy += s * (gn[i][c] - g[i][c]);
            }
        }
        t = if sy > 0.0 { ss / sy } else { 2.0 * t };
        x = xn;
        f = fnew;
        g = gn;
    }
    x
}
