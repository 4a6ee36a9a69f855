//! Integrates the classical pump equation from an empty cavity and watches
//! it settle onto the steady state used by the linearised model.

use xduct::params::{hz_to_rad, integrate_classical_amplitude, steady_amplitude};
use xduct::{DriveProtocol, SystemParams};

fn main() -> xduct::Result<()> {
    let p = SystemParams::reference_device().validate()?;
    let kappa = p.kappa_o.min(p.kappa_e);
    for drive in [
        DriveProtocol::constant(hz_to_rad(500e6)),
        DriveProtocol::parametric(hz_to_rad(500e6), 2),
    ] {
        let steady = steady_amplitude(&p, &drive)?;
        let dt = 0.01 / (2.0 * p.omega_m).max(p.max_rate());
        let tr = integrate_classical_amplitude(&p, &drive, 40.0 / kappa, dt)?;
        println!("{:?} pump, half-step drift {:.1e}", drive.mode, tr.step_drift);
        for &frac in &[5.0, 10.0, 20.0, 30.0, 40.0] {
            let idx = ((frac / kappa) / (tr.times[1] - tr.times[0])).round() as usize;
            let idx = idx.min(tr.times.len() - 1);
            let t = tr.times[idx];
            let target = steady.at_time(p.omega_m, t);
            let err = (tr.alpha_o[idx] - target[0]).norm() / target[0].norm();
            println!("  κt = {:>4.1}: |α_o| = {:.6}  relative error {:.2e}", kappa * t, tr.alpha_o[idx].norm(), err);
        }
    }
    Ok(())
}
