//! Finite-volume solver for the Saint-Venant-Maxwell viscoelastic shallow-water system.
//!
//! The state carries depth `H`, velocity `U`, the in-plane deformation
//! gradient `F`, a material distortion tensor `A` and a vertical distortion
//! `A_cc`. Interfaces are solved with a three-wave relaxation solver built in
//! material coordinates and mapped to the Eulerian grid through a per-face
//! reconstruction of `F`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod euler;
pub mod exec;
pub mod fv2d;
pub mod lagrange;
pub mod linalg;
pub mod model;
pub mod output;
pub mod presets;
pub mod sim;
pub mod wavespeeds;

pub use error::{Invariant, Result, SvmError};
pub use exec::Exec;
pub use linalg::{Mat2, Vec2};
pub use model::{CellState, Conserved, PhysicalParams};
