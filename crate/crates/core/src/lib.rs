//! Toolkit for cone deformations built from a modulus of continuity `φ`: the
//! families and their conditions, the cone and glued maps with their inverses,
//! conformal energies, and sampled moduli of continuity.
//!
//! The core is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod continuity;
pub mod deformations;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod modulus;
pub mod quadrature;
pub mod report;
pub mod roots;
pub mod scalar;
pub mod spec;

pub use error::{Error, Result};
pub use report::VerificationReport;
pub use scalar::Scalar;

pub type Modulus = modulus::ModulusFunction<f64>;
pub type Point = geometry::ConePoint<f64>;
pub type Cone = deformations::ConeMap<f64>;
pub type Glued = deformations::GluedMap<f64>;
pub type Radial = deformations::RadialMap<f64>;
pub type Jacobian = deformations::JacobianData<f64>;
