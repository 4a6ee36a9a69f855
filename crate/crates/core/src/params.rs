//! Physical parameters, pump protocols and the classical pump amplitudes.
//!
//! Everything is stored in angular units (rad/s). Frequencies quoted as
//! "value/2π in Hz" are converted with [`hz_to_rad`] at the boundary.

use std::f64::consts::TAU;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// `f/2π` in Hz to angular frequency in rad/s.
pub fn hz_to_rad(hz: f64) -> f64 {
    hz * TAU
}

/// Angular frequency in rad/s to `f/2π` in Hz.
pub fn rad_to_hz(rad: f64) -> f64 {
    rad / TAU
}

/// Rates and detunings of the optical (`o`), electrical (`e`) and
/// mechanical (`m`) cavities, all in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_m: f64,
    pub delta_o: f64,
    pub delta_e: f64,
    pub kappa_o: f64,
    pub kappa_e: f64,
    pub kappa_m: f64,
    pub kappa_o_ex: f64,
    pub kappa_e_ex: f64,
    pub kappa_m_ex: f64,
    pub g_o: f64,
    pub g_e: f64,
}

impl SystemParams {
    /// The realistic transducer parameter set (values quoted as f/2π).
    pub fn reference_device() -> Self {
        Self {
            omega_m: hz_to_rad(1.4732e6),
            delta_o: hz_to_rad(1.11e6),
            delta_e: hz_to_rad(1.47e6),
            kappa_o: hz_to_rad(2.1e6),
            kappa_e: hz_to_rad(2.5e6),
            kappa_m: hz_to_rad(11.0),
            kappa_o_ex: hz_to_rad(1.1e6),
            kappa_e_ex: hz_to_rad(2.3e6),
            kappa_m_ex: hz_to_rad(11.0),
            g_o: hz_to_rad(6.6),
            g_e: hz_to_rad(3.8),
        }
    }

    /// Symmetric lossless transducer pumped on the red sideband
    /// (`Δ_o = Δ_e = ω_m`, `κ_ex = κ`, `g_o = g_e`). Arguments in rad/s.
    pub fn ideal_symmetric(omega_m: f64, kappa: f64, g: f64, kappa_m: f64) -> Self {
        Self {
            omega_m,
            delta_o: omega_m,
            delta_e: omega_m,
            kappa_o: kappa,
            kappa_e: kappa,
            kappa_m,
            kappa_o_ex: kappa,
            kappa_e_ex: kappa,
            kappa_m_ex: kappa_m,
            g_o: g,
            g_e: g,
        }
    }

    /// The symmetric study point: ω_m/2π = 1.4732 MHz, κ/2π = 2.5 MHz,
    /// g/2π = 3.8 Hz, with the given mechanical damping κ_m in rad/s.
    pub fn symmetric_study(kappa_m: f64) -> Self {
        Self::ideal_symmetric(
            hz_to_rad(1.4732e6),
            hz_to_rad(2.5e6),
            hz_to_rad(3.8),
            kappa_m,
        )
    }

    /// Returns a copy with `κ_m = κ_m,ex = kappa_m`.
    pub fn with_kappa_m(mut self, kappa_m: f64) -> Self {
        self.kappa_m = kappa_m;
        self.kappa_m_ex = kappa_m;
        self
    }

    pub fn kappa_o_int(&self) -> f64 {
        self.kappa_o - self.kappa_o_ex
    }

    pub fn kappa_e_int(&self) -> f64 {
        self.kappa_e - self.kappa_e_ex
    }

    /// Largest rate in the problem; used to scale residuals and ODE steps.
    pub fn max_rate(&self) -> f64 {
        [
            self.omega_m,
            self.delta_o.abs(),
            self.delta_e.abs(),
            self.kappa_o,
            self.kappa_e,
            self.kappa_m,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Checks every invariant and reports the first one violated.
    pub fn validate(self) -> Result<ValidatedParams> {
        let fields: [(&'static str, f64); 11] = [
            ("omega_m", self.omega_m),
            ("delta_o", self.delta_o),
            ("delta_e", self.delta_e),
            ("kappa_o", self.kappa_o),
            ("kappa_e", self.kappa_e),
            ("kappa_m", self.kappa_m),
            ("kappa_o_ex", self.kappa_o_ex),
            ("kappa_e_ex", self.kappa_e_ex),
            ("kappa_m_ex", self.kappa_m_ex),
            ("g_o", self.g_o),
            ("g_e", self.g_e),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::NonFinite { name });
            }
        }
        if self.omega_m <= 0.0 {
            return Err(Error::NonPositiveMechanicalFrequency(self.omega_m));
        }
        // detunings are signed; everything else is a rate
        for (name, value) in fields.into_iter().filter(|(n, _)| !n.starts_with("delta")) {
            if value < 0.0 {
                return Err(Error::NegativeRate { name, value });
            }
        }
        for (cavity, external, total) in [
            ("o", self.kappa_o_ex, self.kappa_o),
            ("e", self.kappa_e_ex, self.kappa_e),
        ] {
            if external > total {
                return Err(Error::ExternalExceedsTotal {
                    cavity,
                    external,
                    total,
                });
            }
        }
        if self.kappa_m_ex != self.kappa_m {
            return Err(Error::MechanicalPortMismatch {
                external: self.kappa_m_ex,
                total: self.kappa_m,
            });
        }
        Ok(ValidatedParams(self))
    }
}

/// [`SystemParams`] that passed [`SystemParams::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidatedParams(SystemParams);

impl ValidatedParams {
    pub fn into_inner(self) -> SystemParams {
        self.0
    }
}

impl Deref for ValidatedParams {
    type Target = SystemParams;

    fn deref(&self) -> &SystemParams {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveMode {
    /// `Ω_i(t) = Ω`
    Constant,
    /// `Ω_i(t) = Ω e^{-2iω_m t}`
    Parametric,
}

/// Symmetric pump applied to both electromagnetic cavities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveProtocol {
    pub mode: DriveMode,
    /// Pump amplitude Ω in rad/s.
    pub omega_drive: f64,
    /// Sideband truncation order N (ignored for constant driving).
    pub n_sidebands: usize,
}

impl DriveProtocol {
    pub fn constant(omega_drive: f64) -> Self {
        Self {
            mode: DriveMode::Constant,
            omega_drive,
            n_sidebands: 1,
        }
    }

    pub fn parametric(omega_drive: f64, n_sidebands: usize) -> Self {
        Self {
            mode: DriveMode::Parametric,
            omega_drive,
            n_sidebands,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.omega_drive.is_finite() || self.omega_drive < 0.0 {
            return Err(Error::InvalidDrive(format!(
                "amplitude must be finite and non-negative, got {}",
                self.omega_drive
            )));
        }
        if self.n_sidebands == 0 {
            return Err(Error::InvalidDrive("n_sidebands must be at least 1".into()));
        }
        Ok(())
    }

    /// Pump amplitude `Ω_i(t)` at time `t`.
    pub fn amplitude_at(&self, omega_m: f64, t: f64) -> C64 {
        match self.mode {
            DriveMode::Constant => C64::new(self.omega_drive, 0.0),
            DriveMode::Parametric => {
                self.omega_drive * C64::from_polar(1.0, -2.0 * omega_m * t)
            }
        }
    }
}

/// Classical steady state of the pumped cavities. For the parametric drive
/// the amplitudes are the envelopes multiplying `e^{-2iω_m t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyAmplitudes {
    pub mode: DriveMode,
    pub alpha_o: C64,
    pub alpha_e: C64,
    /// `G_o = g_o α_o`, rad/s.
    pub g_eff_o: C64,
    /// `G_e = g_e α_e`, rad/s.
    pub g_eff_e: C64,
}

impl SteadyAmplitudes {
    /// Amplitudes `α_i(t)` including the carrier phase.
    pub fn at_time(&self, omega_m: f64, t: f64) -> [C64; 2] {
        let phase = match self.mode {
            DriveMode::Constant => C64::new(1.0, 0.0),
            DriveMode::Parametric => C64::from_polar(1.0, -2.0 * omega_m * t),
        };
        [self.alpha_o * phase, self.alpha_e * phase]
    }
}

/// Steady-state pump amplitudes of both electromagnetic cavities.
///
/// Constant drive: `α = 2Ω / (iκ − 2Δ)`.
/// Parametric drive: `α = 2Ω / (4ω_m − 2Δ + iκ)` (envelope of `e^{-2iω_m t}`).
pub fn steady_amplitude(p: &ValidatedParams, d: &DriveProtocol) -> Result<SteadyAmplitudes> {
    d.validate()?;
    let two_omega = 2.0 * d.omega_drive;
    let amplitude = |cavity: &'static str, delta: f64, kappa: f64| -> Result<C64> {
        let denom = match d.mode {
            DriveMode::Constant => C64::new(-2.0 * delta, kappa),
            DriveMode::Parametric => C64::new(4.0 * p.omega_m - 2.0 * delta, kappa),
        };
        if denom.norm() == 0.0 {
            if two_omega == 0.0 {
                return Ok(C64::new(0.0, 0.0));
            }
            return Err(Error::SingularAmplitude { cavity });
        }
        Ok(two_omega / denom)
    };
    let alpha_o = amplitude("o", p.delta_o, p.kappa_o)?;
    let alpha_e = amplitude("e", p.delta_e, p.kappa_e)?;
    Ok(SteadyAmplitudes {
        mode: d.mode,
        alpha_o,
        alpha_e,
        g_eff_o: alpha_o * p.g_o,
        g_eff_e: alpha_e * p.g_e,
    })
}

/// Right-hand side of the classical pump equation
/// `α̇ = −iΔα − κα/2 − iΩ(t)` for both cavities.
pub fn amplitude_rhs(p: &SystemParams, d: &DriveProtocol, t: f64, alpha: [C64; 2]) -> [C64; 2] {
    let drive = d.amplitude_at(p.omega_m, t);
    let i = C64::i();
    let rhs = |a: C64, delta: f64, kappa: f64| -> C64 {
        -i * delta * a - 0.5 * kappa * a - i * drive
    };
    [
        rhs(alpha[0], p.delta_o, p.kappa_o),
        rhs(alpha[1], p.delta_e, p.kappa_e),
    ]
}

/// Sampled solution of the classical pump equation.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalTrajectory {
    pub times: Vec<f64>,
    pub alpha_o: Vec<C64>,
    pub alpha_e: Vec<C64>,
    /// Max deviation between the `dt` and `dt/2` runs, relative to the
    /// largest amplitude reached.
    pub step_drift: f64,
}

impl ClassicalTrajectory {
    pub fn last(&self) -> (f64, [C64; 2]) {
        let n = self.times.len() - 1;
        (self.times[n], [self.alpha_o[n], self.alpha_e[n]])
    }
}

fn rk4_run(
    p: &SystemParams,
    d: &DriveProtocol,
    steps: usize,
    dt: f64,
    stride: usize,
) -> Vec<[C64; 2]> {
    let f = |t: f64, a: [C64; 2]| amplitude_rhs(p, d, t, a);
    let axpy = |a: [C64; 2], h: f64, k: [C64; 2]| [a[0] + k[0] * h, a[1] + k[1] * h];
    let zero = C64::new(0.0, 0.0);
    let mut state = [zero; 2];
    let mut out = Vec::with_capacity(steps / stride + 1);
    out.push(state);
    for n in 0..steps {
        let t = n as f64 * dt;
        let k1 = f(t, state);
        let k2 = f(t + 0.5 * dt, axpy(state, 0.5 * dt, k1));
        let k3 = f(t + 0.5 * dt, axpy(state, 0.5 * dt, k2));
        let k4 = f(t + dt, axpy(state, dt, k3));
        for c in 0..2 {
            state[c] += (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) * (dt / 6.0);
        }
        if (n + 1) % stride == 0 {
            out.push(state);
        }
    }
    out
}

/// Integrates the classical pump equation from `α(0) = 0` with classical
/// fixed-step RK4, sampling every `dt`.
///
/// The run is repeated with `dt/2`; the returned samples come from the finer
/// run and the relative drift between the two must stay below 1e-6.
pub fn integrate_classical_amplitude(
    p: &ValidatedParams,
    d: &DriveProtocol,
    t_end: f64,
    dt: f64,
) -> Result<ClassicalTrajectory> {
    d.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidStep(format!("t_end must be positive, got {t_end}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(format!("dt must be positive, got {dt}")));
    }
    let fastest = match d.mode {
        DriveMode::Constant => p.max_rate(),
        DriveMode::Parametric => p.max_rate().max(2.0 * p.omega_m),
    };
    if dt * fastest >= 0.1 {
        return Err(Error::InvalidStep(format!(
            "dt = {dt:.3e} s must be below 0.1 / {fastest:.3e} rad/s"
        )));
    }
    let steps = (t_end / dt).ceil() as usize;
    let dt = t_end / steps as f64;

    let coarse = rk4_run(p, d, steps, dt, 1);
    let fine = rk4_run(p, d, 2 * steps, 0.5 * dt, 2);

    let scale = fine
        .iter()
        .flat_map(|a| a.iter().map(|z| z.norm()))
        .fold(0.0, f64::max);
    let drift = if scale > 0.0 {
        coarse
            .iter()
            .zip(&fine)
            .flat_map(|(c, f)| (0..2).map(move |i| (c[i] - f[i]).norm()))
            .fold(0.0, f64::max)
            / scale
    } else {
        0.0
    };
    if drift > 1e-6 {
        return Err(Error::StepTooCoarse { drift });
    }

    Ok(ClassicalTrajectory {
        times: (0..=steps).map(|n| n as f64 * dt).collect(),
        alpha_o: fine.iter().map(|a| a[0]).collect(),
        alpha_e: fine.iter().map(|a| a[1]).collect(),
        step_drift: drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal_pd() -> (ValidatedParams, DriveProtocol) {
        let p = SystemParams::symmetric_study(hz_to_rad(1.0)).validate().unwrap();
        (p, DriveProtocol::parametric(hz_to_rad(500e6), 2))
    }

    #[test]
    fn reference_device_is_valid() {
        SystemParams::reference_device().validate().unwrap();
    }

    #[test]
    fn external_coupling_above_total_is_rejected() {
        let mut p = SystemParams::reference_device();
        p.kappa_o_ex = 2.0 * p.kappa_o;
        let err = p.validate().unwrap_err();
        assert!(matches!(err, Error::ExternalExceedsTotal { cavity: "o", .. }));
        assert!(err.to_string().contains("external coupling exceeds total"));
    }

    #[test]
    fn decoupled_system_is_legal() {
        let mut p = SystemParams::reference_device();
        p.g_o = 0.0;
        p.g_e = 0.0;
        p.validate().unwrap();
    }

    #[test]
    fn first_violation_is_named() {
        let mut p = SystemParams::reference_device();
        p.kappa_e = -1.0;
        p.g_o = -1.0;
        match p.validate().unwrap_err() {
            Error::NegativeRate { name, .. } => assert_eq!(name, "kappa_e"),
            e => panic!("unexpected {e}"),
        }
        let mut p = SystemParams::reference_device();
        p.kappa_m_ex = 0.5 * p.kappa_m;
        assert!(matches!(
            p.validate().unwrap_err(),
            Error::MechanicalPortMismatch { .. }
        ));
        let mut p = SystemParams::reference_device();
        p.omega_m = 0.0;
        assert!(matches!(
            p.validate().unwrap_err(),
            Error::NonPositiveMechanicalFrequency(_)
        ));
    }

    #[test]
    fn negative_detuning_is_allowed() {
        let mut p = SystemParams::reference_device();
        p.delta_o = -p.delta_o;
        p.validate().unwrap();
    }

    #[test]
    fn zero_drive_gives_zero_amplitude() {
        let p = SystemParams::reference_device().validate().unwrap();
        for d in [DriveProtocol::constant(0.0), DriveProtocol::parametric(0.0, 2)] {
            let a = steady_amplitude(&p, &d).unwrap();
            assert_eq!(a.alpha_o, C64::new(0.0, 0.0));
            assert_eq!(a.g_eff_e, C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn parametric_envelope_at_symmetric_point() {
        let (p, d) = ideal_pd();
        let a = steady_amplitude(&p, &d).unwrap();
        // 2Ω/|2ω_m + iκ| with the 2π factors cancelling
        let expected = 1000.0 / (2.9464f64.powi(2) + 2.5f64.powi(2)).sqrt();
        assert!((a.alpha_o.norm() - expected).abs() < 1e-9 * expected);
        assert!((a.alpha_o.norm() - 258.8).abs() < 0.05);
        let g_hz = rad_to_hz(a.g_eff_o.norm());
        assert!((g_hz - 983.0).abs() < 1.0, "{g_hz}");
        assert_eq!(a.g_eff_o, a.alpha_o * p.g_o);
    }

    #[test]
    fn resonant_undamped_amplitude_is_singular() {
        let mut p = SystemParams::reference_device();
        p.kappa_o = 0.0;
        p.kappa_o_ex = 0.0;
        p.delta_o = 0.0;
        let p = p.validate().unwrap();
        let err = steady_amplitude(&p, &DriveProtocol::constant(1.0)).unwrap_err();
        assert!(matches!(err, Error::SingularAmplitude { cavity: "o" }));
    }

    #[test]
    fn invalid_drive_is_rejected() {
        let p = SystemParams::reference_device().validate().unwrap();
        assert!(steady_amplitude(&p, &DriveProtocol::parametric(1.0, 0)).is_err());
        assert!(steady_amplitude(&p, &DriveProtocol::constant(-1.0)).is_err());
    }

    #[test]
    fn zero_drive_trajectory_stays_at_zero() {
        let (p, _) = ideal_pd();
        let d = DriveProtocol::constant(0.0);
        let dt = 0.01 / p.max_rate();
        let tr = integrate_classical_amplitude(&p, &d, 1e-6, dt).unwrap();
        assert!(tr.alpha_o.iter().chain(&tr.alpha_e).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn coarse_step_is_rejected() {
        let (p, d) = ideal_pd();
        let err = integrate_classical_amplitude(&p, &d, 1e-6, 1.0 / p.max_rate()).unwrap_err();
        assert!(matches!(err, Error::InvalidStep(_)));
    }

    #[test]
    fn drift_check_flags_marginal_steps() {
        let (p, d) = ideal_pd();
        // just inside the stability guard but far from 1e-6 accuracy
        let dt = 0.099 / (2.0 * p.omega_m);
        match integrate_classical_amplitude(&p, &d, 2e-6, dt) {
            Err(Error::StepTooCoarse { drift }) => assert!(drift > 1e-6),
            Ok(tr) => assert!(tr.step_drift <= 1e-6),
            Err(e) => panic!("unexpected {e}"),
        }
    }
}
