//! Desk-scale simulator for an atomic-frequency-comb (AFC) optical quantum memory.
//!
//! The crate is organised bottom-up:
//!
//! - [`signals`]: uniform time/frequency grids, complex pulse envelopes, FFT transforms.
//! - [`comb`]: comb optical-depth profiles, the absorber transfer function, the closed-form
//!   first-echo efficiency and a discrete-atom sampler.
//! - [`memory`]: store-and-recall simulation, phenomenological decoherence, efficiency
//!   sweeps, decay fitting, two-pulse photon echo decay and the impedance-matched cavity
//!   projection.
//! - [`multiplex`]: serrodyne shifting, Lorentzian filter cavity and feed-forward
//!   crosstalk between spectral channels.
//! - [`repeater`]: spin-wave control-pulse conflict detection and the single-link rate model.
//! - [`quantumstats`]: photon-pair coincidence Monte Carlo and g²₁₂ estimation.
//! - [`cli`]: configuration files and the experiment runners behind the `afcsim` binary.

// Checks are written as `!(x > 0.0)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod comb;
pub mod error;
pub mod memory;
pub mod multiplex;
pub mod quantumstats;
pub mod repeater;
pub mod signals;

mod util;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
