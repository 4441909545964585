//! Forward model and inverse retrieval for a two-crystal SPDC nonlinear
//! interferometer with an absorbing gas between the crystals.
//!
//! The signal photons are visible, the idler photons are infrared. The
//! gas only interacts with the idler, yet the signal-photon interference
//! map carries the idler's phase and attenuation. This crate simulates
//! those maps and inverts them back to the gas's infrared refractive
//! index and absorption coefficient.
//!
//! Module map:
//!
//! - [`dispersion`]: Sellmeier crystal models, uniaxial index, gas index
//!   pressure law, wavevectors.
//! - [`lineshape`]: Doppler/Lorentz/Voigt profiles, HITRAN and CSV line
//!   lists, absorption spectra.
//! - [`kk`]: finite-band Kramers–Kronig transform.
//! - [`interferometer`]: phase mismatch, intensity maps, instrument
//!   blur, detector noise and map file I/O.
//! - [`retrieval`]: visibility, Levenberg–Marquardt, cross-section fits
//!   and full-spectrum retrieval.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod error;
pub mod exec;
pub mod interferometer;
pub mod kk;
pub mod lineshape;
pub mod retrieval;
pub mod spectrum;
pub mod synthetic;
pub mod units;

pub use error::{Error, Result};
pub use exec::Execution;
