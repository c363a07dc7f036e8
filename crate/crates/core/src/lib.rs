//! Sudden ("anti-adiabatic") quench dynamics for two exactly solvable systems:
//! a particle in an infinitely deep well whose wall jumps, and a spin-1/2 in a
//! rotating magnetic field.
//!
//! All physics is generic over [`Real`]; the `*64` aliases below fix the
//! scalar to `f64`, which is what the tolerances in the test suites assume.

// `!(x > 0)` is used on purpose so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numerics;
pub mod scalar;
pub mod spin;
pub mod well;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;

pub type QuadratureSpec64 = numerics::QuadratureSpec<f64>;
pub type Spinor64 = numerics::Spinor<f64>;

pub type WellConfig64 = well::WellConfig<f64>;
pub type QuenchRatio64 = well::QuenchRatio<f64>;
pub type SpectralDecomposition64 = well::SpectralDecomposition<f64>;
pub type EnergyReport64 = well::EnergyReport<f64>;
pub type ForceProfile64 = well::ForceProfile<f64>;

pub type RotorConfig64 = spin::RotorConfig<f64>;
pub type SpinState64 = spin::SpinState<f64>;
pub type ReturnCurve64 = spin::ReturnCurve<f64>;
pub type ScanSpec64 = spin::ScanSpec<f64>;
