//! Cuspidality analysis for generic 3R positional serial manipulators.
//!
//! The crate is organised bottom-up:
//!
//! * [`dh`]: classical Denavit–Hartenberg kinematics, Jacobian and the
//!   closed-form singularity determinant.
//! * [`reduction`]: reduction of the inverse kinematics to a conic in the
//!   `(cos θ₃, sin θ₃)` plane, the quartic `M(t)` and multiplicity-aware IK.
//! * [`critical`]: tracing of the critical points on the `(θ₂, θ₃)` torus,
//!   their images in the `(ρ, z)` half-plane, cusps, nodes, genericity and the
//!   IKS-count census.
//! * [`topology`]: aspects, pseudosingularities, reduced aspects,
//!   nonsingular posture-change paths and the final cuspidality verdict.
//!
//! Grid evaluation runs on rayon when the `parallel` feature is enabled (the
//! default); results are identical with and without it.

pub mod angle;
pub mod critical;
pub mod dh;
pub mod error;
mod par;
pub mod poly;
pub mod reduction;
pub mod topology;

pub use dh::{CrossSectionPoint, DhParams, JointConfig, Pose3};
pub use error::{Error, Result};
