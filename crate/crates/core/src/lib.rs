//! Quantum noise budget for interferometric displacement and force readout.
//!
//! Homodyne, variational and synodyne displacement spectra in dimensionless
//! units, the standard and quantum limits, classical laser-noise corrections
//! and the calibration chain that turns measured sideband spectra into model
//! parameters. See [`model`] for the unit conventions.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod error;
pub mod exec;
pub mod grid;
pub mod homodyne;
pub mod limits;
pub mod model;
pub mod synodyne;
pub mod sweep;

pub use error::{Error, ErrorKind, Result};
pub use exec::Execution;
pub use grid::FrequencyGrid;
pub use homodyne::{ClassicalNoise, ExternalForce, SpectrumComponents};
pub use model::{Detection, MechanicalMode, OpticalCavity, Power, Rho, SystemParams, ZeroPoint};
