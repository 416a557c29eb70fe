//! Sensor network localization through the semidefinite relaxation
//!
//! ```text
//! find Z ⪰ 0  with  Z₁:₂,₁:₂ = I₂,  ⟨M_ij, Z⟩ = d_ij²,  ⟨M̄_kj, Z⟩ = d_kj²
//! ```
//!
//! solved from its dual, where the only inequality is `S ⪰ 0` and the barrier
//! is `-log det S`. The pipeline is [`localize`]: presolve scaling, a phase-I
//! search for a positive definite slack, accelerated GDAM on the dual, an
//! optional `ζ = 1` polish, primal recovery `Z = η S⁻¹` and a least-squares
//! refinement of the recovered positions.

mod dual;
mod instance;
mod phase1;
mod pipeline;
mod refine;

pub use dual::{adjoint, assemble_slack, dual_barrier_objective, DualEvaluation, SnlDual, V_ENTRIES};
pub use instance::{
    generate_instance, load_instance, load_instance_file, presolve_scale, rmsd, write_instance, AnchorEdge,
    AnchorLayout, DisconnectedWarning, GenerateOptions, Generated, Point, SensorEdge, SnlInstance,
};
pub use phase1::{phase1_initialize, Phase1Options, Phase1Outcome};
pub use pipeline::{
    localize, postsolve_recover, snl_main_solve, LocalizationResult, LocalizationStatus, PolishConfig, Recovery,
    SnlConfig,
};
pub use refine::{nls_objective, nls_value_and_gradient, refine_positions, RefineOptions};
