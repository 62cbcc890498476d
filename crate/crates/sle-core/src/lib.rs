//! Simulation and verification engine for radial and multiradial
//! Schramm–Loewner evolutions with spiral.
//!
//! * [`conformal`]: disc kernels (conformal radius, Poisson kernels, Möbius maps, slit maps).
//! * [`loewner`]: radial Loewner flows, derivative jets, multi-slit charts, curve tracing.
//! * [`partition`]: closed-form partition functions, exponents, fusion constants, rainbow integrals.
//! * [`samplers`]: seeded SDE drivers producing [`samplers::DrivingRecord`]s.
//! * [`verify`]: Monte-Carlo and numerical checks with JSON-ready reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal;
pub mod error;
pub mod loewner;
pub mod par;
pub mod partition;
pub mod rng;
pub mod samplers;
pub mod special;
pub mod stats;
pub mod verify;

pub use error::{Result, SleError};
