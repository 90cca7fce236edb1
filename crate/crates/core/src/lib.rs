//! Realizing positive definite functions on countable abelian groups as
//! correlation functions of concrete sequences and simulated systems.
//!
//! The crate is organized bottom-up:
//!
//! * [`groups`]: supported groups, characters, finite sets, Følner diagnostics;
//! * [`spectral`]: probability measures on the dual group;
//! * [`posdef`]: positive definite functions and finite-window checks;
//! * [`tilings`]: congruent box tilings;
//! * [`gmsc`]: stationary Gaussian paths with a prescribed covariance;
//! * [`realization`]: rotation systems for purely atomic spectra;
//! * [`constructor`]: unimodular sequences whose correlations converge to ν̂;
//! * [`estimator`]: Følner-averaged correlations with Hoeffding certificates.

// `!(x > 0.0)` also rejects NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructor;
pub mod error;
pub mod estimator;
pub mod gmsc;
pub mod groups;
pub mod linalg;
pub mod posdef;
pub mod realization;
pub mod rng;
pub mod sequence;
pub mod spectral;
pub mod tilings;

pub use error::{Error, Result};
pub use groups::{BoxRegion, Character, FinitePart, FolnerPlan, GroupDescriptor, GroupElement};
pub use num_complex::Complex64;
pub use posdef::PosDefFn;
pub use rng::SeedRecord;
pub use sequence::ComplexSequence;
pub use spectral::SpectralMeasure;

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
