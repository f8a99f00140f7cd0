//! Bounded and almost automorphic solutions of neutral delay difference
//! systems through discrete exponential dichotomies.
//!
//! The pipeline: describe a system ([`system`]), build its transition
//! products ([`transition`]), certify a dichotomy ([`dichotomy`]), check the
//! feasibility conditions and iterate the fixed-point operator
//! ([`operator`], [`solver`]), then test the result for almost periodicity
//! or almost automorphy ([`automorphy`]).

pub mod automorphy;
pub mod dichotomy;
pub mod error;
pub mod generator;
pub mod norm;
pub mod operator;
pub mod presets;
pub mod solver;
pub mod system;
pub mod transition;
pub mod window;

pub use dichotomy::{DichotomyCertificate, DichotomyConstants};
pub use error::{Error, Result};
pub use generator::GeneratorSpec;
pub use norm::{Matrix, Vector};
pub use operator::TruncationPlan;
pub use system::{AffineSystem, SystemSpec};
pub use transition::TransitionKernel;
pub use window::{SequenceWindow, TimeWindow};
