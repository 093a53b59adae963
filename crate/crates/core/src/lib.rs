//! Spectral-correlation toolkit for a transversely pumped waveguide photon-pair
//! source.
//!
//! The crate is split along the same lines as a lab workflow:
//!
//! * [`spectral`] builds the theoretical joint spectral amplitude (JSA) from the
//!   pump, phase-matching and cavity factors, and solves the tuning curve.
//! * [`schmidt`] computes the Schmidt number `K`, the intensity-only lower bound
//!   `K_min`, and the data-conditioning steps (filter normalization, frame
//!   cropping, binning) applied to measured intensity matrices.
//! * [`instruments`] simulates the two characterization experiments: a
//!   fiber-spectrometer coincidence measurement and a seeded
//!   difference-frequency sweep recorded on an optical spectrum analyzer.
//! * [`io`] and [`cli`] provide file formats and the command-line front end.

pub mod cli;
pub mod error;
pub mod instruments;
pub mod io;
pub mod numeric;
pub mod schmidt;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
