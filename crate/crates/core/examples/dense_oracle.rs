//! Recursive sideband elimination against a dense solve of the truncated
//! extended system, including the sideband blocks the recursion never
//! builds (k > 2).

use xduct::experiments::relative_difference;
use xduct::linalg::max_abs;
use xduct::params::hz_to_rad;
use xduct::sideband_solver::SidebandSign;
use xduct::{DriveProtocol, SystemParams, Transducer};

fn main() -> xduct::Result<()> {
    let p = SystemParams::reference_device();
    let t = Transducer::new(p, DriveProtocol::parametric(hz_to_rad(500e6), 5))?;
    for probe in [0.5 * p.omega_m, p.omega_m, 1.7 * p.omega_m] {
        let rec = t.solve(probe)?;
        let dense = t.dense(probe, 5)?;
        println!(
            "ω/ω_m = {:.2}: recursive vs dense {:.2e}, condition {:.2e}",
            probe / p.omega_m,
            relative_difference(&rec, &dense),
            dense.condition
        );
        for sign in SidebandSign::BOTH {
            let norms: Vec<String> = (1..=5)
                .map(|k| format!("{:.1e}", max_abs(dense.sideband(sign, k).unwrap().iter())))
                .collect();
            println!("   max |T{sign}[k]|, k = 1..5: {}", norms.join("  "));
        }
    }
    if let Some(adv) = t.stability() {
        println!("advisory stability: max Re λ = {:.3e} rad/s ({})", adv.max_real_part, if adv.stable { "stable" } else { "unstable" });
    }
    Ok(())
}
