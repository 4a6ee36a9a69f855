//! Command-line front end: `solve`, `sweep kappa-m|omega`, `tune`,
//! `verify` and `oracle`.
//!
//! Exit codes: 0 on success, 1 for invalid input, 2 for numerical failure
//! (and for `verify`, 2 when any check fails).

pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::experiments::{self, SweepAxis, SweepSpec};
use crate::metrics;
use crate::params::{hz_to_rad, rad_to_hz, DriveMode, DriveProtocol, SystemParams};
use crate::sideband_solver::Protocol;
use crate::verify::{self, VerifyTarget};
use crate::{Error, Result, Transducer};

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "xduct", version, about = "Transfer matrices, efficiency and added noise of a pumped optomechanical transducer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProbeArg {
    #[value(name = "omega-m")]
    OmegaM,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    #[value(name = "kappa-m")]
    KappaM,
    Omega,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Constant,
    Parametric,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// TOML config (frequencies as value/2π in Hz). Defaults to the
    /// built-in realistic parameter set.
    #[arg(long, short)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve at one probe frequency and print the transfer matrices and
    /// noise report as JSON.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Probe at the mechanical frequency.
        #[arg(long, conflicts_with = "probe_hz")]
        probe_at: Option<ProbeArg>,
        /// Probe frequency /2π in Hz.
        #[arg(long)]
        probe_hz: Option<f64>,
        /// Override the pump mode.
        #[arg(long)]
        mode: Option<ModeArg>,
        /// Override the sideband truncation order.
        #[arg(long)]
        n: Option<usize>,
        /// Use the dense extended-system solve instead of the recursion.
        #[arg(long)]
        dense: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Sweep κ_m or Ω and write a CSV table.
    Sweep {
        axis: AxisArg,
        #[command(flatten)]
        common: Common,
        /// First grid value /2π in Hz.
        #[arg(long)]
        from: Option<f64>,
        /// Last grid value /2π in Hz.
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Tune Ω so that η(ω_m) = 1 within a bracket.
    Tune {
        #[command(flatten)]
        common: Common,
        /// Bracket start /2π in Hz.
        #[arg(long)]
        from: Option<f64>,
        /// Bracket end /2π in Hz.
        #[arg(long)]
        to: Option<f64>,
        /// Use the constant pump instead of the parametric one.
        #[arg(long)]
        constant: bool,
        /// Sideband order for the parametric pump.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run the property suite at the configured point.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the recursive solver with the dense extended solve.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        probe_hz: Option<f64>,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
    },
}

fn load(common: &Common) -> Result<RunConfig> {
    match &common.config {
        Some(path) => RunConfig::load(path),
        None => RunConfig::parse(config::REFERENCE_TOML),
    }
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn configure_threads() {
    let Ok(raw) = std::env::var("XDUCT_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            // a pool may already exist when run() is called repeatedly in-process
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Err(_) => log::warn!("ignoring XDUCT_THREADS={raw:?}: not a non-negative integer"),
    }
}

/// Entry point; returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Solve {
            common,
            probe_at,
            probe_hz,
            mode,
            n,
            dense,
            out,
        } => {
            let cfg = load(&common)?;
            let params = cfg.params();
            let mut drive = cfg.drive.to_drive()?;
            if let Some(m) = mode {
                drive.mode = match m {
                    ModeArg::Constant => DriveMode::Constant,
                    ModeArg::Parametric => DriveMode::Parametric,
                };
            }
            if let Some(n) = n {
                drive.n_sidebands = n;
            }
            let probe = match (probe_at, probe_hz) {
                (Some(ProbeArg::OmegaM), _) => params.omega_m,
                (None, Some(hz)) => hz_to_rad(hz),
                (None, None) => cfg.probe(),
            };
            let t = Transducer::new(params, drive)?;
            let sol = if dense {
                t.dense(probe, drive.n_sidebands)?
            } else {
                t.solve(probe)?
            };
            let report = metrics::added_noise(&sol, metrics::SIGNAL_IN, metrics::SIGNAL_OUT)?;
            let doc = json!({
                "params": params,
                "pump": t.pump_summary(),
                "probe_hz": rad_to_hz(probe),
                "solver": if dense { "dense" } else { "recursive" },
                "stability_advisory": t.stability(),
                "noise": report,
                "solution": output::solution_json(&sol),
            });
            let text = serde_json::to_string_pretty(&doc).expect("serialisable") + "\n";
            emit(&text, out.as_ref().or(cfg.output.path.as_ref()))?;
            Ok(0)
        }
        Command::Sweep {
            axis,
            common,
            from,
            to,
            points,
            out,
        } => {
            let cfg = load(&common)?;
            let s = &cfg.sweep;
            let (kind, grid) = match axis {
                AxisArg::KappaM => (
                    SweepAxis::KappaM,
                    experiments::log_grid(
                        from.or(s.kappa_m_from_hz).unwrap_or(1e-3),
                        to.or(s.kappa_m_to_hz).unwrap_or(1e3),
                        points.or(s.kappa_m_points).unwrap_or(121),
                    ),
                ),
                AxisArg::Omega => (
                    SweepAxis::Omega,
                    experiments::linear_grid(
                        from.or(s.omega_from_hz).unwrap_or(100e6),
                        to.or(s.omega_to_hz).unwrap_or(1000e6),
                        points.or(s.omega_points).unwrap_or(181),
                    ),
                ),
            };
            let spec = SweepSpec {
                axis: kind,
                base: cfg.params(),
                omega_drive: cfg.drive.to_drive()?.omega_drive,
                check_oracle: true,
            };
            let result = experiments::run_sweep(&spec, &grid)?;
            emit(&output::sweep_csv(&result), out.as_ref().or(cfg.output.path.as_ref()))?;
            for c in &result.crossings {
                match c.abscissa_hz {
                    Some(x) => eprintln!("# {} at {} = {x:.6e}", c.description, kind.name()),
                    None => eprintln!("# {}: no crossing in range", c.description),
                }
            }
            Ok(0)
        }
        Command::Tune {
            common,
            from,
            to,
            constant,
            n,
        } => {
            let cfg = load(&common)?;
            let protocol = if constant {
                Protocol::Constant
            } else {
                Protocol::Parametric {
                    n: n.unwrap_or(cfg.drive.n_sidebands),
                }
            };
            let bracket = (
                from.or(cfg.sweep.tune_from_hz).unwrap_or(200e6),
                to.or(cfg.sweep.tune_to_hz).unwrap_or(800e6),
            );
            let r = experiments::tune_unity_efficiency(cfg.params(), protocol, bracket).map_err(|e| match e {
                Error::NoCrossing => Error::Config(format!(
                    "eta - 1 does not change sign on [{:e}, {:e}] Hz",
                    bracket.0, bracket.1
                )),
                other => other,
            })?;
            let doc = json!({
                "protocol": r.protocol,
                "bracket_hz": [bracket.0, bracket.1],
                "omega_star_hz": r.omega_drive_hz,
                "eta": r.eta,
                "eta_minus_one": r.eta - 1.0,
                "iterations": r.iterations,
                "s_added": r.report.s_added,
                "s_lower_bound": r.report.s_lower_bound,
            });
            emit(&(serde_json::to_string_pretty(&doc).expect("serialisable") + "\n"), None)?;
            Ok(0)
        }
        Command::Verify { common } => {
            let cfg = load(&common)?;
            let target = VerifyTarget {
                params: cfg.params(),
                omega_drive: cfg.drive.to_drive()?.omega_drive,
                probe: cfg.probe(),
            };
            let checks = verify::run_suite(&target)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!("{c}");
            }
            println!("{} checks, {} failed", checks.len(), failed);
            Ok(if failed == 0 { 0 } else { 2 })
        }
        Command::Oracle {
            common,
            probe_hz,
            n_max,
        } => {
            let cfg = load(&common)?;
            let probe = probe_hz.map(hz_to_rad).unwrap_or_else(|| cfg.probe());
            let omega = cfg.drive.to_drive()?.omega_drive;
            oracle_report(cfg.params(), omega, probe, n_max)
        }
    }
}

fn oracle_report(params: SystemParams, omega: f64, probe: f64, n_max: usize) -> Result<i32> {
    if n_max == 0 {
        return Err(Error::InvalidDrive("n_max must be at least 1".into()));
    }
    println!("{:>3} {:>14} {:>14} {:>14}", "N", "max |diff|/‖T‖", "eta", "S");
    let mut worst: f64 = 0.0;
    for n in 1..=n_max {
        let t = Transducer::new(params, DriveProtocol::parametric(omega, n))?;
        let rec = t.solve(probe)?;
        let dense = t.dense(probe, n)?;
        let d = experiments::relative_difference(&rec, &dense);
        let r = metrics::added_noise(&rec, metrics::SIGNAL_IN, metrics::SIGNAL_OUT)?;
        worst = worst.max(d);
        println!("{n:>3} {d:>14.3e} {:>14.10} {:>14.10}", r.eta, r.s_added);
    }
    let ok = worst <= verify::TOL_IDENTITY;
    println!(
        "[{}] recursive vs dense: {worst:.3e} (tol {:.0e})",
        if ok { "PASS" } else { "FAIL" },
        verify::TOL_IDENTITY
    );
    Ok(if ok { 0 } else { 2 })
}
