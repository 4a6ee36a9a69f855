//! Mechanical-damping sweep of the symmetric transducer: where each pump
//! protocol's added noise reaches the classical limit S = 0.5.

use xduct::experiments::{default_kappa_m_grid, sweep_kappa_m, SYMMETRIC_STUDY_DRIVE_HZ};
use xduct::params::hz_to_rad;
use xduct::SystemParams;

fn main() -> xduct::Result<()> {
    let grid = default_kappa_m_grid();
    let base = SystemParams::symmetric_study(hz_to_rad(1.0));
    let sweep = sweep_kappa_m(base, hz_to_rad(SYMMETRIC_STUDY_DRIVE_HZ), &grid)?;

    println!("{:>11} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}", "κm/2π Hz", "η const", "S const", "η pd1", "S pd1", "η pd2", "S pd2");
    for i in (0..grid.len()).step_by(10) {
        print!("{:>11.3e}", grid[i]);
        for s in &sweep.series {
            print!(" {:>9.4} {:>9.4}", s.eta[i], s.s[i]);
        }
        println!();
    }
    println!();
    for c in &sweep.crossings {
        match c.abscissa_hz {
            Some(x) => println!("{:<22} at κm/2π = {:.4} Hz", c.description, x),
            None => println!("{:<22} not in range", c.description),
        }
    }
    for s in &sweep.series {
        let (i, r) = s
            .comm_resid
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
        println!(
            "{}: max commutator residual {:.2e} at κm/2π = {:.3e} Hz (dropped weight {:.2e}, all-column residual {:.2e})",
            s.tag(), r, grid[i], s.dropped_weight[i], s.comm_resid_all[i]
        );
    }
    Ok(())
}
