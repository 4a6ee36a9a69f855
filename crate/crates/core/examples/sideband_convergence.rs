//! η and S versus the sideband truncation order N for both study points.
//! Beyond N = 2 nothing changes.

use xduct::experiments::{convergence_study, SYMMETRIC_STUDY_DRIVE_HZ};
use xduct::params::hz_to_rad;
use xduct::SystemParams;

fn main() -> xduct::Result<()> {
    let cases = [
        ("realistic, Ω/2π = 500 MHz", SystemParams::reference_device()),
        ("symmetric, κm/2π = 1 Hz", SystemParams::symmetric_study(hz_to_rad(1.0))),
    ];
    for (name, p) in cases {
        let table = convergence_study(p, hz_to_rad(SYMMETRIC_STUDY_DRIVE_HZ), p.omega_m, 6)?;
        println!("{name}");
        println!("  {:>2} {:>20} {:>20} {:>12}", "N", "η", "S", "Δ vs N=2");
        for r in &table.rows {
            println!("  {:>2} {:>20.16} {:>20.16} {:>12.2e}", r.n, r.eta, r.s, r.matrix_deviation);
        }
        println!(
            "  max relative deviation for N > 2: η {:.1e}, S {:.1e}\n",
            table.max_eta_deviation, table.max_s_deviation
        );
    }
    Ok(())
}
