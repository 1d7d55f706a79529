//! Local character expansions of depth-zero-normalised types for `GL_n`
//! over `F_q((t))`, with mod-ℓ coefficient checks on finite quotients.

pub mod apartment;
pub mod error;
pub mod field;
pub mod finite_types;
pub mod graded;
pub mod laurent;
pub mod measures;
pub mod orbits;
pub mod qmatrix;
pub mod rational;
pub mod refine;
pub mod selftest;
pub mod solver;

pub use error::{DmpError, Result};
