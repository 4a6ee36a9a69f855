//! Where the added noise comes from: every input contributing to the
//! optical output of the realistic transducer, at ω = ω_m.

use xduct::params::{hz_to_rad, rad_to_hz};
use xduct::{DriveProtocol, SystemParams, Transducer};

fn main() -> xduct::Result<()> {
    let p = SystemParams::reference_device();
    for drive in [
        DriveProtocol::constant(hz_to_rad(700e6)),
        DriveProtocol::parametric(hz_to_rad(700e6), 2),
    ] {
        let t = Transducer::new(p, drive)?;
        let r = t.noise(p.omega_m)?;
        println!(
            "{}: η = {:.5}  S = {:.5}  lower bound = {:.5}  R² = {:.3e}",
            r.protocol, r.eta, r.s_added, r.s_lower_bound, r.r_squared
        );
        let mut terms: Vec<_> = r.term_breakdown.iter().filter(|x| x.transfer_sq > 0.0).collect();
        terms.sort_by(|a, b| b.contribution.total_cmp(&a.contribution));
        for x in terms {
            println!(
                "  {:>7} @ {:>+2}  ν/2π = {:>+9.4} MHz  |T|² = {:.4e}  × {:.1}  {}",
                x.source,
                x.sideband,
                rad_to_hz(x.frequency) / 1e6,
                x.transfer_sq,
                x.weight,
                if x.kept { "" } else { "(no such input: dropped)" }
            );
        }
        println!("  commutator residual {:.1e}\n", r.commutator_residual);
    }
    Ok(())
}
