//! Seeded samplers for the driving processes.
//!
//! Every sampler is a pure function of its arguments: the seed keys a ChaCha
//! stream per noise channel, so records replay bit-for-bit.

mod bessel;
mod record;
mod sde;

pub use bessel::{
    bessel_drift, bessel_hits_level, bessel_running_min, sample_bessel, sample_coupled_gap, BesselParams, BesselPath,
    CoupledPaths, CouplingStart,
};
pub use record::{DrivingRecord, Scheme, SleParams};
pub use sde::{
    adaptive_step, multiradial_drift, rho_drift, sample_multiradial_common, sample_radial_sle, sample_radial_sle_rho,
    sample_watermelon_driver, watermelon_weights, WatermelonRun, DT_MIN,
};
