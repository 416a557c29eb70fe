//! Shipped test problems.

mod analytic;
mod cec;
mod nonconvex;
mod qp;

pub use analytic::{analytic_2d_problem, trajectory_apex, trajectory_defect, AnalyticProblem, AnalyticTrajectory};
pub use cec::{cec_problem, CecId, CecProblem, ReferenceSettings};
pub use nonconvex::{nonconvex_2d_problem, NonconvexProblem};
pub use qp::{load_qp, load_qp_file, planted_qp, write_qp, PlantedQp, QpProblem};
