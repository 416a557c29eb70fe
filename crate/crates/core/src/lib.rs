//! First-order interior-point optimization along the direction field
//!
//! ```text
//! s_ζ(x) = -∇f(x)/|∇f(x)| - ζ ∇Φ(x)/|∇Φ(x)|
//! ```
//!
//! where `Φ` is a logarithmic barrier. Iterating this field with fixed-length
//! steps follows the central path toward the boundary and stops at the first
//! boundary contact.
//!
//! ```
//! use gdam::problems::AnalyticProblem;
//! use gdam::solver::{vanilla_solve, SolverConfig};
//! use gdam::Vector;
//!
//! let config = SolverConfig { zeta: 0.99, beta: 1e-2, ..Default::default() };
//! let x0 = Vector::from_vec(vec![5.0, 20.0]);
//! let out = vanilla_solve(&AnalyticProblem, &config, &x0).unwrap();
//! assert!((out.x[1] - 10.0).abs() < 0.1);
//! ```

pub mod barrier;
pub mod direction;
pub mod error;
pub mod linalg;
pub mod problems;
pub mod snl;
pub mod solver;

pub use barrier::{BarrierProblem, CentralityDiagnostics, FnProblem, Problem, Vector};
pub use direction::{gdam_direction, msdm_direction, projected_gdam_direction, Branch, DirectionOutput};
pub use error::{Error, Result};
pub use solver::{accelerated_solve, vanilla_solve, SolveResult, SolverConfig, Termination};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/direction-field.md")]
    mod direction_field {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/problems.md")]
    mod problems {}
    #[doc = include_str!("../../../book/src/equalities.md")]
    mod equalities {}
    #[doc = include_str!("../../../book/src/localization.md")]
    mod localization {}
}
