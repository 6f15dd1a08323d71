//! Bipartite quantum-state analysis.
//!
//! Density-matrix linear algebra, separability criteria (PPT, reduction,
//! realignment, majorisation), entanglement measures, CHSH/CGLMP Bell
//! inequalities, the BBPSSW distillation protocol and the magic-simplex
//! geometry of Bell-diagonal states in 2⊗2 and 3⊗3.
//!
//! The [`oracle`] module holds slow brute-force routines that are kept
//! independent of the closed-form paths they are used to check.

pub mod bases;
pub mod criteria;
pub mod distillation;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod measures;
pub mod nonlocality;
pub mod oracle;
pub mod simplex;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, Subsystem};
pub use states::{Bell, DensityMatrix, PureState, WernerParam};
