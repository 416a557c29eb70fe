use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::dual::SnlDual;
use super::instance::{presolve_scale, rmsd, Point, SnlInstance};
use super::phase1::{phase1_initialize, Phase1Options};
use super::refine::{refine_positions, RefineOptions};
use crate::barrier::{BarrierProblem, Vector};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::solver::{accelerated_solve, vanilla_solve, RestartConfig, SolveResult, SolverConfig, Termination};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolishConfig {
    pub beta: f64,
    pub beta_min: f64,
    pub max_iters: usize,
}

impl Default for PolishConfig {
    fn default() -> Self {
        Self {
            beta: 1e-2,
            beta_min: 1e-10,
            max_iters: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnlConfig {
    /// Presolve length scale.
    pub scale: f64,
    pub phase1: Phase1Options,
    /// Main solve settings (accelerated scheme).
    pub solver: SolverConfig,
    /// `ζ = 1` polish after the main solve; `None` skips it.
    pub polish: Option<PolishConfig>,
    pub refine: RefineOptions,
}

impl Default for SnlConfig {
    fn default() -> Self {
        Self {
            scale: 10.0,
            phase1: Phase1Options::default(),
            solver: SolverConfig {
                zeta: 0.9999,
                beta: 16.18,
                beta_min: 1e-8,
                tau: 0.3,
                momentum: 0.9,
                max_iters: 5_000,
                restart: RestartConfig {
                    monitor_period: 10,
                    slowdown_tol: 1e-2,
                    ..RestartConfig::default()
                },
                ..SolverConfig::default()
            },
            polish: Some(PolishConfig::default()),
            refine: RefineOptions::default(),
        }
    }
}

/// Accelerated GDAM on the dual from a strictly feasible `z0`. The slack
/// factorization failing is the violation signal.
pub fn snl_main_solve(inst: &SnlInstance, z0: &Vector, config: &SolverConfig) -> Result<SolveResult> {
    accelerated_solve(&SnlDual::new(inst), config, z0)
}

/// Primal recovery from a dual point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    /// `Z` after congruence normalization, in original units.
    pub z: DMatrix<f64>,
    pub positions: Vec<Point>,
    pub eta: f64,
    /// `λ₃/λ₁` of `z`.
    pub rank_proxy: f64,
    pub min_pivot: f64,
}

/// `Z = η S⁻¹` with `η = ζ |∇f| / |∇Φ|`, normalized by the congruence
/// `diag(Z₁₁^(-1/2), I)` so that its top-left block is `I₂`; the positions
/// are the off-diagonal block, mapped back to original units.
pub fn postsolve_recover(inst: &SnlInstance, z: &Vector, zeta: f64) -> Result<Recovery> {
    let dual = SnlDual::new(inst);
    let fac = dual.factor(z)?;
    let w = fac.inverse();
    let grad_phi = super::dual::adjoint(inst, &w);
    let eta = zeta * dual.objective_gradient(z).norm() / grad_phi.norm();
    recover_from_inverse(inst, &w, eta, fac.min_pivot())
}

pub(crate) fn recover_from_inverse(inst: &SnlInstance, w: &DMatrix<f64>, eta: f64, min_pivot: f64) -> Result<Recovery> {
    let n = inst.n;
    let mut zm = w * eta;
    let corner = zm.view((0, 0), (2, 2)).into_owned();
    let eig = SymmetricEigen::new(corner);
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::NotPositiveDefinite {
            pivot: 0,
            value: eig.eigenvalues.min(),
        });
    }
    let inv_sqrt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
        * eig.eigenvectors.transpose();
    let mut t = DMatrix::identity(n + 2, n + 2);
    t.view_mut((0, 0), (2, 2)).copy_from(&inv_sqrt);
    // original units: the sensor block shrinks by 1/scale
    for i in 2..n + 2 {
        t[(i, i)] = 1.0 / inst.scale;
    }
    zm = &t * zm * &t;
    zm = (&zm + zm.transpose()) * 0.5;
    let positions = (0..n).map(|j| [zm[(0, j + 2)], zm[(1, j + 2)]]).collect();
    let ev = symmetric_eigenvalues(&zm);
    let rank_proxy = if ev.len() >= 3 && ev[0] > 0.0 { ev[2].max(0.0) / ev[0] } else { 0.0 };
    Ok(Recovery {
        z: zm,
        positions,
        eta,
        rank_proxy,
        min_pivot,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LocalizationStatus {
    Solved,
    /// Some sensors have no path to an anchor; nothing was solved.
    NotLocalizable { unanchored: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationResult {
    pub status: LocalizationStatus,
    pub positions: Vec<Point>,
    pub refined: Vec<Point>,
    pub rmsd_sdp: Option<f64>,
    pub rmsd_refined: Option<f64>,
    pub rank_proxy: Option<f64>,
    pub eta: Option<f64>,
    pub min_pivot: Option<f64>,
    pub phase1_steps: usize,
    pub iterations: usize,
    pub restarts: usize,
    pub polish_iterations: usize,
    pub termination: Option<Termination>,
    /// Largest `|ε² - 2(1 + cos θ)|` over the main-solve trajectory, when recorded.
    pub diagnostics_identity_defect: Option<f64>,
    pub infeasible_accepted: usize,
    /// Polish steps accepted without lowering the objective.
    pub polish_nonmonotone: usize,
    pub runtime_secs: f64,
    #[serde(skip)]
    pub z: Option<DMatrix<f64>>,
}

impl LocalizationResult {
    pub fn is_solved(&self) -> bool {
        self.status == LocalizationStatus::Solved
    }
}

/// Presolve, phase I, main solve, optional polish, recovery and refinement.
/// Instances with sensors out of reach of every anchor return a
/// [`LocalizationStatus::NotLocalizable`] result without solving.
pub fn localize(inst: &SnlInstance, config: &SnlConfig) -> Result<LocalizationResult> {
    let start = Instant::now();
    inst.validate()?;
    let unanchored = inst.unanchored_sensors();
    if !unanchored.is_empty() || inst.n == 0 {
        return Ok(LocalizationResult {
            status: LocalizationStatus::NotLocalizable { unanchored },
            positions: Vec::new(),
            refined: Vec::new(),
            rmsd_sdp: None,
            rmsd_refined: None,
            rank_proxy: None,
            eta: None,
            min_pivot: None,
            phase1_steps: 0,
            iterations: 0,
            restarts: 0,
            polish_iterations: 0,
            termination: None,
            diagnostics_identity_defect: None,
            infeasible_accepted: 0,
            polish_nonmonotone: 0,
            runtime_secs: start.elapsed().as_secs_f64(),
            z: None,
        });
    }
    let scaled = presolve_scale(inst, config.scale)?;
    let p1 = phase1_initialize(&scaled, &config.phase1)?;
    let main = snl_main_solve(&scaled, &p1.z, &config.solver)?;
    let identity_defect = main.trajectory.as_ref().map(|tr| {
        tr.iter()
            .filter_map(|p| Some((p.residual? * p.residual? - 2.0 * (1.0 + p.cos_theta?)).abs()))
            .fold(0.0, f64::max)
    });
    let mut infeasible_accepted = main.stats.infeasible_accepted;

    let mut polish_nonmonotone = 0;
    let (z_final, zeta_final, polish_iterations) = match &config.polish {
        Some(pc) => {
            let cfg = SolverConfig {
                zeta: 1.0,
                beta: pc.beta,
                beta_min: pc.beta_min,
                max_iters: pc.max_iters,
                record_trajectory: false,
                ..config.solver.clone()
            };
            let polished = vanilla_solve(&SnlDual::new(&scaled), &cfg, &main.x)?;
            infeasible_accepted += polished.stats.infeasible_accepted;
            polish_nonmonotone = polished.stats.nonmonotone_accepted;
            (polished.x, 1.0, polished.iterations)
        }
        None => (main.x.clone(), config.solver.zeta, 0),
    };
    let rec = postsolve_recover(&scaled, &z_final, zeta_final)?;
    let refined = refine_positions(inst, &rec.positions, &config.refine);
    let (rmsd_sdp, rmsd_refined) = match &inst.sensors {
        Some(truth) => (Some(rmsd(&rec.positions, truth)?), Some(rmsd(&refined, truth)?)),
        None => (None, None),
    };
    Ok(LocalizationResult {
        status: LocalizationStatus::Solved,
        positions: rec.positions,
        refined,
        rmsd_sdp,
        rmsd_refined,
        rank_proxy: Some(rec.rank_proxy),
        eta: Some(rec.eta),
        min_pivot: Some(rec.min_pivot),
        phase1_steps: p1.steps,
        iterations: main.iterations,
        restarts: main.restarts,
        polish_iterations,
        termination: Some(main.termination),
        diagnostics_identity_defect: identity_defect,
        infeasible_accepted,
        polish_nonmonotone,
        runtime_secs: start.elapsed().as_secs_f64(),
        z: Some(rec.z),
    })
}
