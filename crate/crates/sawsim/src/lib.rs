//! Simulation and parameter-estimation toolkit for a flux-tunable
//! superconducting qubit coupled to a multimode surface-acoustic-wave cavity
//! through a split interdigital transducer.
//!
//! The crate is organized around the physical layers of the device:
//!
//! - [`idt`]: double-slit transducer response, emission rate, and acoustic
//!   frequency shift of the qubit;
//! - [`mirror`]: Bragg mirror transfer matrices, stopband, and the confined
//!   mode ladder;
//! - [`transmon`]: flux curve, its inversion, and coherence bookkeeping;
//! - [`jc`]: multimode single-excitation spectra and dispersive shifts;
//! - [`spectra`]: phonon-number-split qubit spectroscopy;
//! - [`fit`]: deterministic synthetic data and damped least-squares fits;
//! - [`config`], [`csvio`], [`svg`]: I/O for the command-line tool;
//! - [`papercheck`]: the consistency suite run by `sawsim papercheck`.

pub mod cli;
pub mod config;
pub mod csvio;
pub mod error;
pub mod fit;
pub mod idt;
pub mod jc;
pub mod math;
pub mod mirror;
pub mod papercheck;
pub mod spectra;
pub mod svg;
pub mod transmon;

pub use error::{Error, Result};
