//! Geometry and dynamics of light-like particles in inhomogeneous optical
//! media, modelled by the Lagrangian `L = ½|y|² + (γ²/2)|y|⁴` with
//! `γ² = n² − 1`.
//!
//! The crate computes the fundamental tensor, semispray, nonlinear and
//! Cartan connections, torsions and curvatures of this Lagrange space,
//! integrates its equations of motion, and solves for the helix, circle and
//! line families of radially symmetric media.

#![allow(clippy::needless_range_loop)]

pub mod closedform;
pub mod config;
pub mod connection;
pub mod curvature;
pub mod dynamics;
pub mod error;
pub mod fd;
pub mod media;
pub mod metric;
pub mod plot;
pub mod roots;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use media::{ProfileSpec, RadialFunction, RefractiveProfile, Symmetry};
pub use metric::PhasePoint;
