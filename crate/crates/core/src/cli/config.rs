//! TOML run configuration. Every frequency is entered as `value/2π` in Hz.
//!
//! ```toml
//! [params]
//! omega_m_hz = 1.4732e6
//! delta_o_hz = 1.11e6
//! delta_e_hz = 1.47e6
//! kappa_o_hz = 2.1e6
//! kappa_e_hz = 2.5e6
//! kappa_m_hz = 11.0
//! kappa_o_ex_hz = 1.1e6
//! kappa_e_ex_hz = 2.3e6
//! kappa_m_ex_hz = 11.0     # optional, defaults to kappa_m_hz
//! g_o_hz = 6.6
//! g_e_hz = 3.8
//!
//! [drive]
//! mode = "parametric"      # or "constant"
//! omega_hz = 500e6
//! n_sidebands = 2
//!
//! [probe]
//! at = "omega-m"           # or: frequency_hz = 1.4e6
//!
//! [sweep]                  # all optional
//! kappa_m_from_hz = 1e-3
//! kappa_m_to_hz = 1e3
//! kappa_m_points = 121
//! omega_from_hz = 100e6
//! omega_to_hz = 1000e6
//! omega_points = 181
//! tune_from_hz = 200e6
//! tune_to_hz = 800e6
//!
//! [output]
//! path = "out.csv"         # optional, stdout otherwise
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::params::{hz_to_rad, DriveMode, DriveProtocol, SystemParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub omega_m_hz: f64,
    pub delta_o_hz: f64,
    pub delta_e_hz: f64,
    pub kappa_o_hz: f64,
    pub kappa_e_hz: f64,
    pub kappa_m_hz: f64,
    pub kappa_o_ex_hz: f64,
    pub kappa_e_ex_hz: f64,
    pub kappa_m_ex_hz: Option<f64>,
    pub g_o_hz: f64,
    pub g_e_hz: f64,
}

impl ParamsSection {
    pub fn to_params(&self) -> SystemParams {
        SystemParams {
            omega_m: hz_to_rad(self.omega_m_hz),
            delta_o: hz_to_rad(self.delta_o_hz),
            delta_e: hz_to_rad(self.delta_e_hz),
            kappa_o: hz_to_rad(self.kappa_o_hz),
            kappa_e: hz_to_rad(self.kappa_e_hz),
            kappa_m: hz_to_rad(self.kappa_m_hz),
            kappa_o_ex: hz_to_rad(self.kappa_o_ex_hz),
            kappa_e_ex: hz_to_rad(self.kappa_e_ex_hz),
            kappa_m_ex: hz_to_rad(self.kappa_m_ex_hz.unwrap_or(self.kappa_m_hz)),
            g_o: hz_to_rad(self.g_o_hz),
            g_e: hz_to_rad(self.g_e_hz),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub mode: DriveMode,
    pub omega_hz: Option<f64>,
    /// Per-cavity amplitudes are accepted only when equal.
    pub omega_o_hz: Option<f64>,
    pub omega_e_hz: Option<f64>,
    #[serde(default = "default_n")]
    pub n_sidebands: usize,
}

fn default_n() -> usize {
    2
}

impl DriveSection {
    /// Symmetric pump amplitude in Hz.
    pub fn amplitude_hz(&self) -> Result<f64> {
        let values: Vec<(&str, f64)> = [
            ("drive.omega_hz", self.omega_hz),
            ("drive.omega_o_hz", self.omega_o_hz),
            ("drive.omega_e_hz", self.omega_e_hz),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect();
        let Some(&(_, first)) = values.first() else {
            return Err(Error::Config("missing key `drive.omega_hz`".into()));
        };
        if let Some((key, _)) = values.iter().find(|(_, v)| *v != first) {
            return Err(Error::Config(format!(
                "`{key}` differs from the other drive amplitude: only symmetric driving is supported"
            )));
        }
        Ok(first)
    }

    pub fn to_drive(&self) -> Result<DriveProtocol> {
        let d = DriveProtocol {
            mode: self.mode,
            omega_drive: hz_to_rad(self.amplitude_hz()?),
            n_sidebands: self.n_sidebands,
        };
        d.validate()?;
        Ok(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum ProbeAt {
    #[serde(rename = "omega-m")]
    OmegaM,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub at: Option<ProbeAt>,
    pub frequency_hz: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub kappa_m_from_hz: Option<f64>,
    pub kappa_m_to_hz: Option<f64>,
    pub kappa_m_points: Option<usize>,
    pub omega_from_hz: Option<f64>,
    pub omega_to_hz: Option<f64>,
    pub omega_points: Option<usize>,
    pub tune_from_hz: Option<f64>,
    pub tune_to_hz: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsSection,
    pub drive: DriveSection,
    #[serde(default)]
    pub probe: ProbeSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.drive.amplitude_hz()?;
        cfg.params.to_params().validate()?;
        if cfg.probe.at.is_some() && cfg.probe.frequency_hz.is_some() {
            return Err(Error::Config(
                "`probe.at` and `probe.frequency_hz` are mutually exclusive".into(),
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn params(&self) -> SystemParams {
        self.params.to_params()
    }

    /// Probe frequency in rad/s (ω_m unless set).
    pub fn probe(&self) -> f64 {
        match self.probe.frequency_hz {
            Some(hz) => hz_to_rad(hz),
            None => self.params().omega_m,
        }
    }
}

/// The realistic parameter set with a 500 MHz parametric pump.
pub const REFERENCE_TOML: &str = r#"[params]
omega_m_hz = 1.4732e6
delta_o_hz = 1.11e6
delta_e_hz = 1.47e6
kappa_o_hz = 2.1e6
kappa_e_hz = 2.5e6
kappa_m_hz = 11.0
kappa_o_ex_hz = 1.1e6
kappa_e_ex_hz = 2.3e6
kappa_m_ex_hz = 11.0
g_o_hz = 6.6
g_e_hz = 3.8

[drive]
mode = "parametric"
omega_hz = 500e6
n_sidebands = 2

[probe]
at = "omega-m"
"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_reference_device() {
        let cfg = RunConfig::parse(REFERENCE_TOML).unwrap();
        assert_eq!(cfg.params(), SystemParams::reference_device());
        assert_eq!(cfg.probe(), SystemParams::reference_device().omega_m);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = REFERENCE_TOML.replace("g_e_hz = 3.8", "g_e_hz = 3.8\ng_x_hz = 1.0");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("g_x_hz"), "{err}");
    }

    #[test]
    fn missing_key_is_named() {
        let text = REFERENCE_TOML.replace("delta_o_hz = 1.11e6\n", "");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("delta_o_hz"), "{err}");
    }

    #[test]
    fn asymmetric_drive_is_rejected() {
        let text = REFERENCE_TOML.replace("omega_hz = 500e6", "omega_o_hz = 500e6\nomega_e_hz = 400e6");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("symmetric"), "{err}");
        let text = REFERENCE_TOML.replace("omega_hz = 500e6", "omega_o_hz = 500e6\nomega_e_hz = 500e6");
        RunConfig::parse(&text).unwrap();
    }

    #[test]
    fn invalid_physics_is_rejected() {
        let text = REFERENCE_TOML.replace("kappa_o_ex_hz = 1.1e6", "kappa_o_ex_hz = 4.2e6");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("external coupling exceeds total"));
    }
}
