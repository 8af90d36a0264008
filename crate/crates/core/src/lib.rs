//! Decision procedures for lifting finite cyclic subgroups across
//! `Aut F_n → Out F_n → GL(n, Z)` and `Aut π₁S_g → Out π₁S_g → Sp(2g, Z)`.

pub mod arith;
pub mod exact_linalg;
pub mod free_groups;
pub mod graph_of_groups;
pub mod integer_reps;
mod serde_int;
pub mod surface_toolkit;

pub use exact_linalg::{
    cokernel, extension_abelianization, is_symplectic, matrix_order, max_torsion_order_gl,
    phi_target, smith_normal_form, FinGenAbGroup, IntMatrix, LinalgError, MatrixOrder, SmithForm,
};
pub use free_groups::{conjugation_witness, FreeAutomorphism, FreeGroupError, FreeWord};
pub use graph_of_groups::{
    replay, verify_phi_nonlift, Certificate, GogError, GraphOfGroups, SearchConfig, Verdict,
};
pub use integer_reps::{
    decomposition_type, lift_decision, DecompositionType, IntegerRepError, LiftDecision,
};
pub use surface_toolkit::{ObstructionReport, SurfaceError};
