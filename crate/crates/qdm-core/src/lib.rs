//! Exact simulation of quantum double models D_M(Z_N) with matter fields on
//! the vertices of a 2D cell complex.
//!
//! The crate is organised bottom-up:
//! - [`cyclic_action`]: the group Z_N and its permutation action on matter labels.
//! - [`cw_complex`]: oriented cell complexes (tori, unions, wedges).
//! - [`state_space`]: mixed-radix basis and dense state vectors.
//! - [`model_operators`]: matrix-free vertex, face and edge operators, H and P.
//! - [`algebra`]: randomized verification of the operator algebra.
//! - [`spectrum`]: degeneracy, vacua, low spectrum, violation counts.
//! - [`excitations`]: strings, confinement, W operators, fusion, condensation.
//! - [`cli`]: configuration parsing and the report-producing commands.

pub mod algebra;
pub mod cli;
pub mod cw_complex;
pub mod cyclic_action;
pub mod error;
pub mod excitations;
pub mod model_operators;
pub mod report;
pub mod spectrum;
pub mod state_space;

pub use error::{ErrorClass, QdmError, Result};
