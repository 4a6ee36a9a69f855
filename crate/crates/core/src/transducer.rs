//! Convenience bundle: parameters, pump, steady state and the matrices
//! derived from them, ready to be probed at any frequency.

use serde::Serialize;

use crate::matrix_builder::{
    build_drift_constant, build_drift_fourier, build_port_layout, DriftMatrix, PortLayout,
    SidebandMatrixSet,
};
use crate::metrics::{self, NoiseReport};
use crate::params::{steady_amplitude, DriveMode, DriveProtocol, SteadyAmplitudes, SystemParams, ValidatedParams};
use crate::sideband_solver::{self, StabilityAdvisory, TransferSolution};
use crate::Result;

#[derive(Debug, Clone)]
pub enum Model {
    Constant(DriftMatrix),
    Parametric(SidebandMatrixSet),
}

#[derive(Debug, Clone)]
pub struct Transducer {
    pub params: ValidatedParams,
    pub drive: DriveProtocol,
    pub amplitudes: SteadyAmplitudes,
    pub layout: PortLayout,
    pub model: Model,
}

/// Short summary used in reports.
#[derive(Debug, Clone, Serialize)]
pub struct PumpSummary {
    pub mode: DriveMode,
    pub omega_drive_hz: f64,
    pub n_sidebands: usize,
    pub alpha_o_abs: f64,
    pub alpha_e_abs: f64,
    pub g_eff_o_hz: f64,
    pub g_eff_e_hz: f64,
}

impl Transducer {
    /// Validates `params` and `drive` and builds the matrices.
    pub fn new(params: SystemParams, drive: DriveProtocol) -> Result<Self> {
        Self::from_validated(params.validate()?, drive)
    }

    pub fn from_validated(params: ValidatedParams, drive: DriveProtocol) -> Result<Self> {
        let amplitudes = steady_amplitude(&params, &drive)?;
        let layout = build_port_layout(&params);
        let model = match drive.mode {
            DriveMode::Constant => Model::Constant(build_drift_constant(&params, &amplitudes)),
            DriveMode::Parametric => Model::Parametric(build_drift_fourier(&params, &amplitudes)),
        };
        Ok(Self {
            params,
            drive,
            amplitudes,
            layout,
            model,
        })
    }

    /// Solve at probe frequency `omega` (rad/s) with the configured order.
    pub fn solve(&self, omega: f64) -> Result<TransferSolution> {
        self.solve_with(omega, self.drive.n_sidebands)
    }

    /// Solve with an explicit truncation order (ignored for constant drive).
    pub fn solve_with(&self, omega: f64, n: usize) -> Result<TransferSolution> {
        match &self.model {
            Model::Constant(d) => sideband_solver::solve_constant(d, &self.layout, omega),
            Model::Parametric(m) => sideband_solver::solve_parametric(m, &self.layout, omega, n),
        }
    }

    /// Dense extended-system solve. For constant drive this is the direct
    /// solve, which is already dense.
    pub fn dense(&self, omega: f64, n: usize) -> Result<TransferSolution> {
        match &self.model {
            Model::Constant(d) => sideband_solver::solve_constant(d, &self.layout, omega),
            Model::Parametric(m) => sideband_solver::dense_oracle(m, &self.layout, omega, n),
        }
    }

    /// Efficiency and added noise for the default signal path `e.ex → o.ex`.
    pub fn noise(&self, omega: f64) -> Result<NoiseReport> {
        metrics::added_noise(&self.solve(omega)?, metrics::SIGNAL_IN, metrics::SIGNAL_OUT)
    }

    pub fn stability(&self) -> Option<StabilityAdvisory> {
        match &self.model {
            Model::Constant(d) => sideband_solver::stability_constant(d),
            Model::Parametric(m) => sideband_solver::stability_parametric(m, self.drive.n_sidebands),
        }
    }

    pub fn pump_summary(&self) -> PumpSummary {
        use crate::params::rad_to_hz;
        PumpSummary {
            mode: self.drive.mode,
            omega_drive_hz: rad_to_hz(self.drive.omega_drive),
            n_sidebands: self.drive.n_sidebands,
            alpha_o_abs: self.amplitudes.alpha_o.norm(),
            alpha_e_abs: self.amplitudes.alpha_e.norm(),
            g_eff_o_hz: rad_to_hz(self.amplitudes.g_eff_o.norm()),
            g_eff_e_hz: rad_to_hz(self.amplitudes.g_eff_e.norm()),
        }
    }
}
