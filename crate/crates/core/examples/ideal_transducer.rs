//! The symmetric lossless transducer against its closed forms.
//!
//! Numerics need κ_m > 0, so each element is computed along a decreasing
//! κ_m sequence and extrapolated to κ_m → 0.

use xduct::analytic_reference::{
    const_symmetric, ideal_added_noise, pd_ideal, zero_damping_limit, IdealCase, IdealProtocol,
    KAPPA_M_SEQUENCE_HZ,
};
use xduct::metrics::{self, SignalRow};
use xduct::params::hz_to_rad;
use xduct::{DriveProtocol, SystemParams, Transducer, C64};

const DRIVE_HZ: f64 = 500e6;

fn row(kappa_m: f64, drive: DriveProtocol) -> xduct::Result<(SignalRow, f64)> {
    let t = Transducer::new(SystemParams::symmetric_study(kappa_m), drive)?;
    let sol = t.solve(t.params.omega_m)?;
    let s = metrics::added_noise(&sol, metrics::SIGNAL_IN, metrics::SIGNAL_OUT)?.s_added;
    Ok((metrics::signal_row(&sol)?, s))
}

fn limit(drive: DriveProtocol, pick: fn(&SignalRow, f64) -> C64) -> xduct::Result<C64> {
    Ok(zero_damping_limit(&KAPPA_M_SEQUENCE_HZ, |k| {
        let (r, s) = row(k, drive)?;
        Ok(pick(&r, s))
    })?
    .limit)
}

fn main() -> xduct::Result<()> {
    let base = SystemParams::symmetric_study(1.0);
    let w = hz_to_rad(DRIVE_HZ);
    println!("r = κ/4ω_m = {:.6}", base.kappa_o / (4.0 * base.omega_m));

    let constant = DriveProtocol::constant(w);
    let t = Transducer::new(base, constant)?;
    let case = IdealCase::new(base.kappa_o, base.omega_m, IdealProtocol::Constant);
    let cf = const_symmetric(&case, t.amplitudes.g_eff_o);
    println!("\nconstant pump            numeric (κm→0)              closed form");
    for (name, pick, exact) in [
        ("T_oe ", (|r: &SignalRow, _| r.t_oe) as fn(&SignalRow, f64) -> C64, cf.t_oe),
        ("T_oo ", |r, _| r.t_oo, cf.t_oo),
        ("T_oe'", |r, _| r.t_oe_conj, cf.t_oe_conj),
        ("T_oo'", |r, _| r.t_oo_conj, cf.t_oo_conj),
    ] {
        let z = limit(constant, pick)?;
        println!("  {name}  {:>+.8} {:>+.8}i    {:>+.8} {:>+.8}i", z.re, z.im, exact.re, exact.im);
    }
    let s = limit(constant, |_, s| C64::new(s, 0.0))?.re;
    println!("  S      {s:.8}                    {:.8}", ideal_added_noise(&case));

    for (n, protocol) in [(1, IdealProtocol::ParametricN1), (2, IdealProtocol::ParametricN2)] {
        let drive = DriveProtocol::parametric(w, n);
        let case = IdealCase::new(base.kappa_o, base.omega_m, protocol);
        let cf = pd_ideal(&case);
        println!("\nparametric pump, N = {n}   |numeric| (κm→0)   closed form");
        for (name, pick, exact) in [
            ("η    ", (|r: &SignalRow, _| r.t_oe) as fn(&SignalRow, f64) -> C64, cf.eta),
            ("T_oe'", |r, _| r.t_oe_conj, cf.t_oe_conj),
            ("T_oo ", |r, _| r.t_oo, cf.t_oo),
            ("T_oo'", |r, _| r.t_oo_conj, cf.t_oo_conj),
            ("V_oo'", |r, _| r.v_oo_conj, cf.v_oo_conj),
            ("V_oe'", |r, _| r.v_oe_conj, cf.v_oe_conj),
        ] {
            let z = limit(drive, pick)?;
            println!("  {name}  {:>14.8}     {:>10.8}", z.norm(), exact);
        }
        let s = limit(drive, |_, s| C64::new(s, 0.0))?.re;
        println!("  S      {s:>14.8}     {:>10.8}", ideal_added_noise(&case));
    }
    Ok(())
}
