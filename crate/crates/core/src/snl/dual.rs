use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::instance::SnlInstance;
use crate::barrier::{BarrierProblem, Vector};
use crate::error::{Error, Result};
use crate::linalg::SpdFactor;

/// Number of free entries of the symmetric 2×2 block `V`.
pub const V_ENTRIES: usize = 3;

/// `S = -[V 0; 0 0] - Σ y_ij M_ij - Σ y_kj M̄_kj`, with `y` ordered as the
/// sensor-sensor edges followed by the sensor-anchor edges and
/// `v = [V₁₁, V₁₂, V₂₂]`.
pub fn assemble_slack(inst: &SnlInstance, y: &[f64], v: [f64; 3]) -> Result<DMatrix<f64>> {
    if y.len() != inst.num_edges() {
        return Err(Error::IndexMismatch(format!(
            "{} multipliers for {} edges",
            y.len(),
            inst.num_edges()
        )));
    }
    let mut s = DMatrix::zeros(inst.n + 2, inst.n + 2);
    add_operator(inst, y, v, -1.0, &mut s);
    Ok(s)
}

/// `out += w · ([V 0; 0 0] + Σ y A)`.
fn add_operator(inst: &SnlInstance, y: &[f64], v: [f64; 3], w: f64, out: &mut DMatrix<f64>) {
    out[(0, 0)] += w * v[0];
    out[(0, 1)] += w * v[1];
    out[(1, 0)] += w * v[1];
    out[(1, 1)] += w * v[2];
    let (yss, ysa) = y.split_at(inst.edges_ss.len());
    for (e, &t) in inst.edges_ss.iter().zip(yss) {
        let (a, b) = (e.i + 2, e.j + 2);
        let t = w * t;
        out[(a, a)] += t;
        out[(b, b)] += t;
        out[(a, b)] -= t;
        out[(b, a)] -= t;
    }
    for (e, &t) in inst.edges_sa.iter().zip(ysa) {
        let a = inst.anchors[e.k];
        let j = e.j + 2;
        let t = w * t;
        for p in 0..2 {
            for q in 0..2 {
                out[(p, q)] += t * a[p] * a[q];
            }
            out[(p, j)] -= t * a[p];
            out[(j, p)] -= t * a[p];
        }
        out[(j, j)] += t;
    }
}

/// `[⟨W, E₁₁⟩, ⟨W, E₁₂ + E₂₁⟩, ⟨W, E₂₂⟩, ⟨W, M_ij⟩..., ⟨W, M̄_kj⟩...]` for
/// symmetric `W`: the gradient of `-log det S` when `W = S⁻¹`.
pub fn adjoint(inst: &SnlInstance, w: &DMatrix<f64>) -> Vector {
    let mut g = Vector::zeros(V_ENTRIES + inst.num_edges());
    g[0] = w[(0, 0)];
    g[1] = 2.0 * w[(0, 1)];
    g[2] = w[(1, 1)];
    let mut t = V_ENTRIES;
    for e in &inst.edges_ss {
        let (a, b) = (e.i + 2, e.j + 2);
        g[t] = w[(a, a)] + w[(b, b)] - 2.0 * w[(a, b)];
        t += 1;
    }
    for e in &inst.edges_sa {
        let a = inst.anchors[e.k];
        let j = e.j + 2;
        let corner = a[0] * a[0] * w[(0, 0)] + 2.0 * a[0] * a[1] * w[(0, 1)] + a[1] * a[1] * w[(1, 1)];
        g[t] = corner - 2.0 * (a[0] * w[(0, j)] + a[1] * w[(1, j)]) + w[(j, j)];
        t += 1;
    }
    g
}

/// The dual of the localization relaxation, posed for a minimizing solver:
/// variables `z = (V₁₁, V₁₂, V₂₂, y)`, objective
/// `-(⟨I, V⟩ + Σ y d²)` and barrier `-log det S(z)`.
#[derive(Debug, Clone)]
pub struct SnlDual<'a> {
    inst: &'a SnlInstance,
    cost: Vector,
}

impl<'a> SnlDual<'a> {
    pub fn new(inst: &'a SnlInstance) -> Self {
        let mut cost = Vector::zeros(V_ENTRIES + inst.num_edges());
        cost[0] = -1.0;
        cost[2] = -1.0;
        let d2 = inst.edges_ss.iter().map(|e| e.d).chain(inst.edges_sa.iter().map(|e| e.d));
        for (t, d) in d2.enumerate() {
            cost[V_ENTRIES + t] = -d * d;
        }
        Self { inst, cost }
    }

    pub fn instance(&self) -> &SnlInstance {
        self.inst
    }

    pub fn split(z: &Vector) -> ([f64; 3], &[f64]) {
        let s = z.as_slice();
        ([s[0], s[1], s[2]], &s[V_ENTRIES..])
    }

    pub fn slack(&self, z: &Vector) -> DMatrix<f64> {
        let (v, y) = Self::split(z);
        let mut s = DMatrix::zeros(self.inst.n + 2, self.inst.n + 2);
        add_operator(self.inst, y, v, -1.0, &mut s);
        s
    }

    pub fn factor(&self, z: &Vector) -> Result<SpdFactor> {
        SpdFactor::new(&self.slack(z))
    }
}

impl BarrierProblem for SnlDual<'_> {
    fn dim(&self) -> usize {
        self.cost.len()
    }

    fn objective(&self, z: &Vector) -> f64 {
        self.cost.dot(z)
    }

    fn objective_gradient(&self, _z: &Vector) -> Vector {
        self.cost.clone()
    }

    fn barrier(&self, z: &Vector) -> Result<(f64, Vector)> {
        let f = self.factor(z)?;
        Ok((-f.log_det(), adjoint(self.inst, &f.inverse())))
    }

    fn is_strictly_interior(&self, z: &Vector) -> bool {
        self.factor(z).is_ok()
    }
}

/// Objective and barrier parts of the dual at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualEvaluation {
    pub objective: f64,
    pub objective_gradient: Vector,
    pub barrier: f64,
    pub barrier_gradient: Vector,
    /// Smallest pivot of the slack factorization.
    pub min_pivot: f64,
}

pub fn dual_barrier_objective(inst: &SnlInstance, z: &Vector) -> Result<DualEvaluation> {
    let dual = SnlDual::new(inst);
    if z.len() != dual.dim() {
        return Err(Error::IndexMismatch(format!(
            "dual vector has {} entries, expected {}",
            z.len(),
            dual.dim()
        )));
    }
    let f = dual.factor(z)?;
    Ok(DualEvaluation {
        objective: dual.objective(z),
        objective_gradient: dual.cost.clone(),
        barrier: -f.log_det(),
        barrier_gradient: adjoint(inst, &f.inverse()),
        min_pivot: f.min_pivot(),
    })
}

/// `λI + S(z)`, the shifted slack of the phase-I problem.
pub(crate) fn shifted_slack(inst: &SnlInstance, z: &Vector, lambda: f64) -> DMatrix<f64> {
    let (v, y) = SnlDual::split(z);
    let mut s = DMatrix::identity(inst.n + 2, inst.n + 2) * lambda;
    add_operator(inst, y, v, -1.0, &mut s);
    s
}
