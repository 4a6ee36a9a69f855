//! Studies: mechanical-damping and pump-amplitude sweeps,
//! crossing extraction, unity-efficiency tuning and sideband convergence.
//!
//! All sweeps probe at `ω = ω_m` and compare the constant pump with the
//! parametric pump truncated at N = 1 and N = 2. Grid abscissae are given as
//! `value/2π` in Hz.

use rayon::prelude::*;
use serde::Serialize;

use crate::linalg;
use crate::metrics::{self, NoiseReport};
use crate::params::{hz_to_rad, DriveProtocol, SystemParams};
use crate::sideband_solver::{Protocol, SidebandSign, TransferSolution};
use crate::{Error, Result, Transducer};

/// Default mechanical-damping grid: 121 log-spaced points, 1e-3..1e3 Hz.
pub fn default_kappa_m_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 121)
}

/// Default pump-amplitude grid: 181 points, 100..1000 MHz.
pub fn default_omega_grid() -> Vec<f64> {
    linear_grid(100e6, 1000e6, 181)
}

/// Pump amplitude of the symmetric study, Ω/2π in Hz.
pub const SYMMETRIC_STUDY_DRIVE_HZ: f64 = 500e6;

pub fn linear_grid(from: f64, to: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![from],
        _ => {
            let step = (to - from) / (points - 1) as f64;
            (0..points)
                .map(|k| if k + 1 == points { to } else { from + step * k as f64 })
                .collect()
        }
    }
}

pub fn log_grid(from: f64, to: f64, points: usize) -> Vec<f64> {
    linear_grid(from.log10(), to.log10(), points)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect()
}

/// The three protocols compared in every sweep.
pub const SWEEP_PROTOCOLS: [Protocol; 3] = [
    Protocol::Constant,
    Protocol::Parametric { n: 1 },
    Protocol::Parametric { n: 2 },
];

/// Short series name: `const`, `pd1`, `pd2`, ...
pub fn protocol_tag(p: Protocol) -> String {
    match p {
        Protocol::Constant => "const".into(),
        Protocol::Parametric { n } => format!("pd{n}"),
    }
}

pub fn drive_for(protocol: Protocol, omega_drive: f64) -> DriveProtocol {
    match protocol {
        Protocol::Constant => DriveProtocol::constant(omega_drive),
        Protocol::Parametric { n } => DriveProtocol::parametric(omega_drive, n),
    }
}

/// Everything computed at one (parameters, pump, protocol) point.
#[derive(Debug, Clone, Serialize)]
pub struct PointEval {
    pub report: NoiseReport,
    /// Commutator residual with every column kept (no sign rule).
    pub comm_resid_all: f64,
    /// Max elementwise |recursive − dense| over `T`, `T_±[1]`, `T_±[2]`,
    /// relative to `max(1, ‖T‖_∞)`. Zero for constant drive.
    pub oracle_diff: f64,
}

/// Max elementwise difference between two solutions over `T`, `T_±[1]` and
/// `T_±[2]`, relative to `max(1, ‖T‖_∞)` of the first.
pub fn relative_difference(a: &TransferSolution, b: &TransferSolution) -> f64 {
    metrics::solution_difference(a, b) / a.scale()
}

/// Solve and measure at probe frequency `probe` (rad/s).
pub fn evaluate(
    params: SystemParams,
    omega_drive: f64,
    protocol: Protocol,
    probe: f64,
    check_oracle: bool,
) -> Result<PointEval> {
    let t = Transducer::new(params, drive_for(protocol, omega_drive))?;
    let sol = t.solve(probe)?;
    let report = metrics::added_noise(&sol, metrics::SIGNAL_IN, metrics::SIGNAL_OUT)?;
    let comm_resid_all = metrics::commutator_residual_all_columns(&sol, metrics::SIGNAL_OUT)?;
    let oracle_diff = match protocol {
        Protocol::Parametric { n } if check_oracle => {
            relative_difference(&sol, &t.dense(probe, n)?)
        }
        _ => 0.0,
    };
    Ok(PointEval {
        report,
        comm_resid_all,
        oracle_diff,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepAxis {
    /// κ_m/2π in Hz (κ_m,ex follows κ_m).
    KappaM,
    /// Ω/2π in Hz.
    Omega,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::KappaM => "kappa_m_hz",
            SweepAxis::Omega => "omega_hz",
        }
    }

    fn logarithmic(self) -> bool {
        matches!(self, SweepAxis::KappaM)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Axis {
    pub kind: SweepAxis,
    pub values_hz: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub protocol: Protocol,
    pub eta: Vec<f64>,
    pub s: Vec<f64>,
    pub lower_bound: Vec<f64>,
    pub comm_resid: Vec<f64>,
    pub comm_resid_all: Vec<f64>,
    pub dropped_weight: Vec<f64>,
    pub oracle_diff: Vec<f64>,
}

impl Series {
    pub fn tag(&self) -> String {
        protocol_tag(self.protocol)
    }
}

/// A located crossing; `abscissa_hz` is `None` when the difference does not
/// change sign on the grid.
#[derive(Debug, Clone, Serialize)]
pub struct Crossing {
    pub description: String,
    pub grid_estimate_hz: Option<f64>,
    pub abscissa_hz: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub axis: Axis,
    pub series: Vec<Series>,
    pub crossings: Vec<Crossing>,
}

impl SweepResult {
    pub fn series(&self, protocol: Protocol) -> Option<&Series> {
        self.series.iter().find(|s| s.protocol == protocol)
    }

    pub fn crossing(&self, description: &str) -> Option<&Crossing> {
        self.crossings.iter().find(|c| c.description == description)
    }
}

/// What a sweep holds fixed and what it varies.
#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub base: SystemParams,
    /// Pump amplitude (rad/s) when the axis is κ_m.
    pub omega_drive: f64,
    /// Also run the dense oracle at every point.
    pub check_oracle: bool,
}

impl SweepSpec {
    /// Parameters and pump amplitude at abscissa `x_hz`.
    pub fn at(&self, x_hz: f64) -> (SystemParams, f64) {
        match self.axis {
            SweepAxis::KappaM => (self.base.with_kappa_m(hz_to_rad(x_hz)), self.omega_drive),
            SweepAxis::Omega => (self.base, hz_to_rad(x_hz)),
        }
    }

    fn eval(&self, x_hz: f64, protocol: Protocol, oracle: bool) -> Result<PointEval> {
        let (p, w) = self.at(x_hz);
        evaluate(p, w, protocol, p.omega_m, oracle).map_err(|e| Error::AtGridPoint {
            axis: self.axis.name(),
            value: x_hz,
            source: Box::new(e),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Eta,
    S,
}

/// One side of a crossing comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Series(Protocol),
    Threshold(f64),
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("sweep grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Runs a sweep over `grid` (Hz) for the three standard protocols and
/// extracts the standard crossings.
pub fn run_sweep(spec: &SweepSpec, grid: &[f64]) -> Result<SweepResult> {
    validate_grid(grid)?;
    if spec.axis == SweepAxis::KappaM && grid[0] <= 0.0 {
        return Err(Error::Config("kappa_m grid must be positive".into()));
    }
    let cells: Vec<(usize, Protocol)> = (0..grid.len())
        .flat_map(|i| SWEEP_PROTOCOLS.into_iter().map(move |p| (i, p)))
        .collect();
    let evals: Vec<PointEval> = cells
        .par_iter()
        .map(|&(i, p)| spec.eval(grid[i], p, spec.check_oracle))
        .collect::<Result<Vec<_>>>()?;

    let series = SWEEP_PROTOCOLS
        .iter()
        .enumerate()
        .map(|(slot, &protocol)| {
            let pts: Vec<&PointEval> = evals.iter().skip(slot).step_by(SWEEP_PROTOCOLS.len()).collect();
            let pick = |f: fn(&PointEval) -> f64| pts.iter().map(|e| f(e)).collect::<Vec<f64>>();
            Series {
                protocol,
                eta: pick(|e| e.report.eta),
                s: pick(|e| e.report.s_added),
                lower_bound: pick(|e| e.report.s_lower_bound),
                comm_resid: pick(|e| e.report.commutator_residual),
                comm_resid_all: pick(|e| e.comm_resid_all),
                dropped_weight: pick(|e| e.report.dropped_weight),
                oracle_diff: pick(|e| e.oracle_diff),
            }
        })
        .collect();

    let mut result = SweepResult {
        axis: Axis {
            kind: spec.axis,
            values_hz: grid.to_vec(),
        },
        series,
        crossings: Vec::new(),
    };
    result.crossings = standard_crossings(spec, &result)?;
    Ok(result)
}

/// Damping sweep over κ_m/2π (Hz) with the pump fixed at
/// `omega_drive` (rad/s).
pub fn sweep_kappa_m(base: SystemParams, omega_drive: f64, grid_hz: &[f64]) -> Result<SweepResult> {
    run_sweep(
        &SweepSpec {
            axis: SweepAxis::KappaM,
            base,
            omega_drive,
            check_oracle: true,
        },
        grid_hz,
    )
}

/// Pump-amplitude sweep over the pump amplitude Ω/2π (Hz).
pub fn sweep_omega(base: SystemParams, grid_hz: &[f64]) -> Result<SweepResult> {
    run_sweep(
        &SweepSpec {
            axis: SweepAxis::Omega,
            base,
            omega_drive: 0.0,
            check_oracle: true,
        },
        grid_hz,
    )
}

fn standard_crossings(spec: &SweepSpec, result: &SweepResult) -> Result<Vec<Crossing>> {
    let mut wanted: Vec<(Quantity, Protocol, Target)> = Vec::new();
    let pds = [Protocol::Parametric { n: 1 }, Protocol::Parametric { n: 2 }];
    for pd in pds {
        wanted.push((Quantity::Eta, pd, Target::Series(Protocol::Constant)));
        wanted.push((Quantity::S, pd, Target::Series(Protocol::Constant)));
    }
    match spec.axis {
        SweepAxis::KappaM => {
            for p in SWEEP_PROTOCOLS {
                wanted.push((Quantity::S, p, Target::Threshold(0.5)));
            }
        }
        SweepAxis::Omega => {
            for pd in pds {
                wanted.push((Quantity::Eta, pd, Target::Threshold(1.0)));
            }
        }
    }
    wanted
        .into_iter()
        .map(|(q, p, t)| locate(spec, result, q, p, t))
        .collect()
}

/// Human-readable name of a comparison, e.g. `S_pd1 = S_const`.
pub fn describe(q: Quantity, p: Protocol, target: Target) -> String {
    let name = match q {
        Quantity::Eta => "eta",
        Quantity::S => "S",
    };
    let rhs = match target {
        Target::Series(other) => format!("{name}_{}", protocol_tag(other)),
        Target::Threshold(v) => format!("{v}"),
    };
    format!("{name}_{} = {rhs}", protocol_tag(p))
}

fn column(result: &SweepResult, q: Quantity, p: Protocol) -> Vec<f64> {
    let s = result.series(p).expect("standard protocol present");
    match q {
        Quantity::Eta => s.eta.clone(),
        Quantity::S => s.s.clone(),
    }
}

fn locate(
    spec: &SweepSpec,
    result: &SweepResult,
    q: Quantity,
    p: Protocol,
    target: Target,
) -> Result<Crossing> {
    let description = describe(q, p, target);
    let grid = &result.axis.values_hz;
    let a = column(result, q, p);
    let b = match target {
        Target::Series(other) => column(result, q, other),
        Target::Threshold(v) => vec![v; grid.len()],
    };
    let log = spec.axis.logarithmic();
    let (idx, estimate) = match find_crossing(grid, &a, &b, log) {
        Ok(found) => found,
        Err(Error::NoCrossing) => {
            return Ok(Crossing {
                description,
                grid_estimate_hz: None,
                abscissa_hz: None,
            })
        }
        Err(e) => return Err(e),
    };
    let value = |x: f64, proto: Protocol| -> Result<f64> {
        let e = spec.eval(x, proto, false)?;
        Ok(match q {
            Quantity::Eta => e.report.eta,
            Quantity::S => e.report.s_added,
        })
    };
    let diff = |x: f64| -> Result<f64> {
        let lhs = value(x, p)?;
        let rhs = match target {
            Target::Series(other) => value(x, other)?,
            Target::Threshold(v) => v,
        };
        Ok(lhs - rhs)
    };
    let refined = if idx + 1 < grid.len() {
        refine_crossing(diff, grid[idx], grid[idx + 1], 1e-4, log)?
    } else {
        estimate
    };
    Ok(Crossing {
        description,
        grid_estimate_hz: Some(estimate),
        abscissa_hz: Some(refined),
    })
}

/// First sign change of `a − b` on `grid`, located by linear interpolation
/// (in `log10(x)` when `log_axis`). Returns the left bracket index and the
/// interpolated abscissa.
pub fn find_crossing(grid: &[f64], a: &[f64], b: &[f64], log_axis: bool) -> Result<(usize, f64)> {
    assert!(grid.len() == a.len() && a.len() == b.len(), "series length mismatch");
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let x = |k: usize| if log_axis { grid[k].log10() } else { grid[k] };
    let back = |v: f64| if log_axis { 10f64.powf(v) } else { v };
    if d.first() == Some(&0.0) && d.get(1).is_some_and(|v| *v != 0.0) {
        return Ok((0, grid[0]));
    }
    for k in 0..d.len().saturating_sub(1) {
        let (d0, d1) = (d[k], d[k + 1]);
        if !(d0.is_finite() && d1.is_finite()) || d0 == 0.0 {
            continue;
        }
        if d1 == 0.0 {
            return Ok((k, grid[k + 1]));
        }
        if d0.signum() != d1.signum() {
            let t = d0 / (d0 - d1);
            return Ok((k, back(x(k) + t * (x(k + 1) - x(k)))));
        }
    }
    Err(Error::NoCrossing)
}

/// Bisection of `f` on `[lo, hi]` (in `log10(x)` when `log_axis`) until the
/// bracket is narrower than `rel_tol` relative to its midpoint.
pub fn refine_crossing<F>(f: F, lo: f64, hi: f64, rel_tol: f64, log_axis: bool) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoCrossing);
    }
    let mid = |a: f64, b: f64| if log_axis { (a * b).sqrt() } else { 0.5 * (a + b) };
    for _ in 0..200 {
        let m = mid(lo, hi);
        if (hi - lo) <= rel_tol * m.abs() {
            return Ok(m);
        }
        let f_m = f(m)?;
        if f_m == 0.0 {
            return Ok(m);
        }
        if f_m.signum() == f_lo.signum() {
            lo = m;
            f_lo = f_m;
        } else {
            hi = m;
        }
    }
    Err(Error::NoConvergence(200))
}

#[derive(Debug, Clone, Serialize)]
pub struct TuneResult {
    pub protocol: Protocol,
    pub omega_drive_hz: f64,
    pub eta: f64,
    pub iterations: usize,
    pub report: NoiseReport,
}

/// Tolerance on `|η − 1|` reached by [`tune_unity_efficiency`].
pub const TUNE_TOLERANCE: f64 = 1e-10;

/// Finds a pump amplitude Ω*/2π (Hz) inside `bracket_hz` with `η(ω_m) = 1`,
/// using the Illinois variant of regula falsi. The bracket order does not
/// matter.
pub fn tune_unity_efficiency(
    base: SystemParams,
    protocol: Protocol,
    bracket_hz: (f64, f64),
) -> Result<TuneResult> {
    let (mut a, mut b) = (bracket_hz.0.min(bracket_hz.1), bracket_hz.0.max(bracket_hz.1));
    if !(a.is_finite() && b.is_finite() && a >= 0.0 && b > a) {
        return Err(Error::Config(format!(
            "invalid bracket [{}, {}]",
            bracket_hz.0, bracket_hz.1
        )));
    }
    let probe = base.omega_m;
    let eta = |x: f64| -> Result<f64> {
        Ok(evaluate(base, hz_to_rad(x), protocol, probe, false)?.report.eta - 1.0)
    };
    let mut fa = eta(a)?;
    let mut fb = eta(b)?;
    if fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        return Err(Error::NoCrossing);
    }
    let finish = |x: f64, iterations: usize| -> Result<TuneResult> {
        let e = evaluate(base, hz_to_rad(x), protocol, probe, false)?;
        Ok(TuneResult {
            protocol,
            omega_drive_hz: x,
            eta: e.report.eta,
            iterations,
            report: e.report,
        })
    };
    if fa == 0.0 {
        return finish(a, 0);
    }
    if fb == 0.0 {
        return finish(b, 0);
    }
    let mut side = 0i8;
    for it in 1..=200 {
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = eta(x)?;
        if fx.abs() <= TUNE_TOLERANCE || (b - a) <= 4.0 * f64::EPSILON * b {
            return finish(x, it);
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::NoConvergence(200))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub eta: f64,
    pub s: f64,
    /// Max relative change of `T`, `T_±[1]`, `T_±[2]` against N = 2.
    pub matrix_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Max over N > 2 of `|η(N) − η(2)| / η(2)`.
    pub max_eta_deviation: f64,
    /// Max over N > 2 of `|S(N) − S(2)| / S(2)` (absolute if `S(2) = 0`).
    pub max_s_deviation: f64,
}

/// η and S at probe `probe` (rad/s) for N = 1..=n_max.
pub fn convergence_study(
    base: SystemParams,
    omega_drive: f64,
    probe: f64,
    n_max: usize,
) -> Result<ConvergenceTable> {
    if n_max < 3 {
        return Err(Error::InvalidDrive(format!("n_max must be at least 3, got {n_max}")));
    }
    let sols: Vec<TransferSolution> = (1..=n_max)
        .map(|n| Transducer::new(base, DriveProtocol::parametric(omega_drive, n))?.solve(probe))
        .collect::<Result<_>>()?;
    let n2 = &sols[1];
    let mut rows = Vec::new();
    for (idx, sol) in sols.iter().enumerate() {
        let r = metrics::added_noise(sol, metrics::SIGNAL_IN, metrics::SIGNAL_OUT)?;
        rows.push(ConvergenceRow {
            n: idx + 1,
            eta: r.eta,
            s: r.s_added,
            matrix_deviation: relative_difference(n2, sol),
        });
    }
    let rel = |x: f64, r: f64| if r == 0.0 { x.abs() } else { (x - r).abs() / r.abs() };
    let (eta2, s2) = (rows[1].eta, rows[1].s);
    let higher = || rows.iter().filter(|r| r.n > 2);
    let max_eta_deviation = higher().map(|r| rel(r.eta, eta2)).fold(0.0, f64::max);
    let max_s_deviation = higher()
        .map(|r| if s2 == 0.0 { r.s.abs() } else { rel(r.s, s2) })
        .fold(0.0, f64::max);
    Ok(ConvergenceTable {
        rows,
        max_eta_deviation,
        max_s_deviation,
    })
}

/// Max relative difference of sideband blocks `(sign, k)` present in
/// both solutions; helper for reports.
pub fn sideband_difference(a: &TransferSolution, b: &TransferSolution, sign: SidebandSign, k: usize) -> Option<f64> {
    let (x, y) = (a.sideband(sign, k)?, b.sideband(sign, k)?);
    Some(linalg::max_abs((x - y).iter()) / a.scale())
}
