//! Exact spectral model of vector fields on the unit box with vanishing
//! tangential trace.

pub mod model;
pub mod trig;

pub use model::{
    build_cavity, build_cavity_with_threads, contraction_check, contraction_check_vector, decompose_field,
    div_orthogonality_probe, identity_check, korn_measure, korn_rayleigh_max, BasisField, CavityConfig,
    CavityModel, CavitySummary, ContractionCheck, DivProbe, FieldSplit, IdentityCheck, KornReport,
};
pub use trig::{apply_div, apply_grad, apply_rot, trig_overlap, Curl, Kind, Mode, TrigField, TrigTensor};
