//! Frequency-domain scattering analysis of a three-mode optomechanical
//! transducer (optical cavity, microwave resonator, shared mechanical mode)
//! under constant or parametric pump driving.
//!
//! The pipeline is:
//!
//! 1. [`params`]: physical rates in rad/s, pump protocol, classical steady
//!    amplitudes and effective couplings.
//! 2. [`matrix_builder`]: 6×6 drift matrix, its Fourier blocks for the
//!    parametric drive, and the port coupling matrix `B`.
//! 3. [`sideband_solver`]: transfer matrices `T(ω)` and the sideband
//!    matrices `T±[k](ω)`, by recursive 2×2-block elimination or by a dense
//!    solve of the truncated extended system.
//! 4. [`metrics`]: efficiency, added noise, its squeezing lower bound and
//!    commutator bookkeeping.
//! 5. [`experiments`]: parameter sweeps, crossing extraction, Ω tuning and
//!    sideband convergence studies.
//!
//! State ordering everywhere is `[a_o, a_e, a_o†, a_e†, a_m, a_m†]`.

pub mod analytic_reference;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod matrix_builder;
pub mod metrics;
pub mod params;
pub mod sideband_solver;
pub mod transducer;
pub mod verify;

pub use error::{Error, Result};
pub use matrix_builder::{Cavity, PortLayout, Quadrature, SidebandMatrixSet};
pub use metrics::NoiseReport;
pub use params::{DriveMode, DriveProtocol, SteadyAmplitudes, SystemParams, ValidatedParams};
pub use sideband_solver::{Protocol, SidebandSign, TransferSolution};
pub use transducer::Transducer;

/// Complex double used for every matrix entry.
pub type C64 = num_complex::Complex64;
