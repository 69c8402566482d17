//! Metric-aware subspace geometry.
//!
//! Inclination of subspace pairs in finite-dimensional complex Hilbert spaces
//! with an arbitrary Gram metric, certified two-subspace decompositions,
//! norm-bounded functional extension, a truncated l² fixture with closed
//! forms, and an exact trigonometric spectral model of zero-tangential-trace
//! vector fields on the unit box.

pub mod cavity;
pub mod decompose;
pub mod error;
pub mod functional;
pub mod hilbert;
pub mod io;
pub mod l2model;
pub mod linalg;
pub mod report;
pub mod subspace;

pub use error::{Error, Result};
pub use hilbert::{inner, make_space, norm, HilbertSpace, Vector};
pub use linalg::{CMat, CVec, C64};
pub use subspace::{inclination, inclination_oracle, Containment, InclinationReport, Subspace};
