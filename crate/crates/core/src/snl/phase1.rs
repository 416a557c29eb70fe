use serde::{Deserialize, Serialize};

use super::dual::{adjoint, shifted_slack, SnlDual, V_ENTRIES};
use super::instance::SnlInstance;
use crate::barrier::Vector;
use crate::error::{Error, Result};
use crate::linalg::SpdFactor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase1Options {
    /// Shift `λ` of the auxiliary barrier `-log det(λI + S)`.
    pub lambda: f64,
    pub max_steps: usize,
}

impl Default for Phase1Options {
    fn default() -> Self {
        Self {
            lambda: 10.0,
            max_steps: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase1Outcome {
    pub z: Vector,
    pub steps: usize,
}

/// Gradient descent on `-log det(λI + S(z))` from `z = 0`, stopped at the
/// first point where `S(z)` itself is positive definite. Steps use Armijo
/// backtracking that also keeps the shifted slack positive definite.
pub fn phase1_initialize(inst: &SnlInstance, opts: &Phase1Options) -> Result<Phase1Outcome> {
    if !(opts.lambda > 0.0) {
        return Err(Error::InvalidConfig(format!("phase-I shift lambda = {} must be > 0", opts.lambda)));
    }
    let dual = SnlDual::new(inst);
    let mut z = Vector::zeros(V_ENTRIES + inst.num_edges());
    let eval = |z: &Vector| -> Option<(f64, SpdFactor)> {
        let f = SpdFactor::new(&shifted_slack(inst, z, opts.lambda)).ok()?;
        Some((-f.log_det(), f))
    };
    let (mut h, mut fac) = eval(&z).expect("λI is positive definite");
    let mut t = 1.0;
    for step in 0..=opts.max_steps {
        if dual.factor(&z).is_ok() {
            return Ok(Phase1Outcome { z, steps: step });
        }
        if step == opts.max_steps {
            break;
        }
        let g = adjoint(inst, &fac.inverse());
        let g2 = g.norm_squared();
        if g2 == 0.0 {
            break;
        }
        loop {
            let trial = &z - &g * t;
            match eval(&trial) {
                Some((ht, ft)) if ht <= h - 1e-4 * t * g2 => {
                    z = trial;
                    h = ht;
                    fac = ft;
                    t *= 2.0;
                    break;
                }
                _ => {
                    t *= 0.5;
                    if t < 1e-16 {
                        return Err(Error::Phase1Failure { steps: step });
                    }
                }
            }
        }
    }
    Err(Error::Phase1Failure { steps: opts.max_steps })
}
