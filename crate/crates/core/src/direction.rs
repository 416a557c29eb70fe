//! The search direction field
//!
//! ```text
//! s_ζ = -∇f/|∇f| - ζ ∇Φ/|∇Φ|     if ∇Φ ≠ 0
//! s_ζ = -∇f                      otherwise
//! ```
//!
//! together with its equality-projected form and the two-vector construction
//! from the singular vectors of the normalized sensitivity matrix, which is
//! kept as an independent route to the same field.

use serde::{Deserialize, Serialize};

use crate::barrier::{barrier_gradient_vanishes, centrality_with_tol, CentralityDiagnostics, Vector, BARRIER_ZERO_RTOL};
use crate::error::{Error, Result};
use crate::linalg::EqualityProjector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Normalized objective and barrier gradients combined with weight `ζ`.
    Combined,
    /// `∇Φ = 0`: plain steepest descent `-∇f`.
    GradientDescentSafeguard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionOutput {
    pub direction: Vector,
    pub branch: Branch,
    pub diagnostics: CentralityDiagnostics,
}

fn check_zeta(zeta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&zeta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("zeta = {zeta} is outside [0, 1]")))
    }
}

pub fn gdam_direction(grad_f: &Vector, grad_phi: &Vector, zeta: f64) -> Result<DirectionOutput> {
    gdam_direction_with_tol(grad_f, grad_phi, zeta, BARRIER_ZERO_RTOL)
}

/// [`gdam_direction`] with an explicit relative zero test for `|∇Φ|`.
pub fn gdam_direction_with_tol(
    grad_f: &Vector,
    grad_phi: &Vector,
    zeta: f64,
    zero_rtol: f64,
) -> Result<DirectionOutput> {
    check_zeta(zeta)?;
    let nf = grad_f.norm();
    if nf == 0.0 {
        return Err(Error::DegenerateObjectiveGradient);
    }
    let diagnostics = centrality_with_tol(grad_f, grad_phi, zeta, zero_rtol)?;
    let np = grad_phi.norm();
    if barrier_gradient_vanishes(nf, np, zero_rtol) {
        return Ok(DirectionOutput {
            direction: -grad_f,
            branch: Branch::GradientDescentSafeguard,
            diagnostics,
        });
    }
    let direction = grad_f * (-1.0 / nf) - grad_phi * (zeta / np);

    #[cfg(debug_assertions)]
    if let Some(cos) = diagnostics.cos_theta {
        let expected = -nf * (1.0 + zeta * cos);
        debug_assert!(
            (direction.dot(grad_f) - expected).abs() <= 1e-8 * nf.max(1.0),
            "descent identity violated"
        );
    }

    Ok(DirectionOutput {
        direction,
        branch: Branch::Combined,
        diagnostics,
    })
}

/// The direction field restricted to the null space of an equality block.
pub fn projected_gdam_direction(
    grad_f: &Vector,
    grad_phi: &Vector,
    zeta: f64,
    projector: &EqualityProjector,
) -> Result<DirectionOutput> {
    projected_gdam_direction_with_tol(grad_f, grad_phi, zeta, projector, BARRIER_ZERO_RTOL)
}

pub fn projected_gdam_direction_with_tol(
    grad_f: &Vector,
    grad_phi: &Vector,
    zeta: f64,
    projector: &EqualityProjector,
    zero_rtol: f64,
) -> Result<DirectionOutput> {
    if projector.num_equalities() == 0 {
        return gdam_direction_with_tol(grad_f, grad_phi, zeta, zero_rtol);
    }
    let pf = projector.project(grad_f);
    // gradients lying in the row space of A project to round-off
    if pf.norm() <= 1e-12 * grad_f.norm() {
        return Err(Error::DegenerateObjectiveGradient);
    }
    let pphi = projector.project(grad_phi);
    let pphi = if pphi.norm() <= 1e-12 * grad_phi.norm() {
        Vector::zeros(pphi.len())
    } else {
        pphi
    };
    gdam_direction_with_tol(&pf, &pphi, zeta, zero_rtol)
}

/// Direction built from the right singular vectors of the normalized
/// sensitivity matrix `[∇fᵀ/|∇f|; ∇gᵀ/|∇g|]`:
/// `s_c = cos α₁ v₁ + c cos α₂ v₂`, with `c >= 1` amplifying the component
/// that decreases both the objective and the constraint.
///
/// Its direction coincides with the GDAM field at `ζ = (c - 1)/(c + 1)`; it is
/// kept as an oracle for that field and not used by the solvers.
pub fn msdm_direction(grad_f: &Vector, grad_g: &Vector, c: f64) -> Result<Vector> {
    if !(c >= 1.0) {
        return Err(Error::Domain(format!("amplification c = {c} must be >= 1")));
    }
    let nf = grad_f.norm();
    let ng = grad_g.norm();
    if nf == 0.0 {
        return Err(Error::DegenerateObjectiveGradient);
    }
    if ng == 0.0 {
        return Err(Error::DegenerateGeometry(0.0));
    }
    let uf = grad_f / nf;
    let ug = grad_g / ng;
    let cos = uf.dot(&ug).clamp(-1.0, 1.0);
    let sin2 = 1.0 - cos * cos;
    if sin2 < 1e-24 {
        return Err(Error::DegenerateGeometry(sin2));
    }
    let v1 = (&ug - &uf) / (2.0 - 2.0 * cos).sqrt();
    let v2 = (-&uf - &ug) / (2.0 + 2.0 * cos).sqrt();
    let cos_a1 = ((1.0 - cos) / 2.0).sqrt();
    let cos_a2 = ((1.0 + cos) / 2.0).sqrt();
    Ok(v1 * cos_a1 + v2 * (c * cos_a2))
}
