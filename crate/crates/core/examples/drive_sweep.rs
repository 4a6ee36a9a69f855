//! Pump-amplitude sweep at the realistic parameter set: efficiency and
//! added noise of the constant and parametric pumps, plus where they cross.

use xduct::experiments::{default_omega_grid, sweep_omega};
use xduct::SystemParams;

fn main() -> xduct::Result<()> {
    let grid = default_omega_grid();
    let sweep = sweep_omega(SystemParams::reference_device(), &grid)?;

    println!("{:>10} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}", "Ω/2π MHz", "η const", "S const", "η pd1", "S pd1", "η pd2", "S pd2");
    for i in (0..grid.len()).step_by(10) {
        print!("{:>10.1}", grid[i] / 1e6);
        for s in &sweep.series {
            print!(" {:>9.5} {:>9.5}", s.eta[i], s.s[i]);
        }
        println!();
    }
    println!();
    for c in &sweep.crossings {
        match c.abscissa_hz {
            Some(x) => println!("{:<22} at Ω/2π = {:.2} MHz", c.description, x / 1e6),
            None => println!("{:<22} not in range", c.description),
        }
    }
    let worst = |f: fn(&xduct::experiments::Series) -> &Vec<f64>| {
        sweep.series.iter().flat_map(|s| f(s).iter().copied()).fold(0.0, f64::max)
    };
    println!();
    println!("max commutator residual (sign rule): {:.2e}", worst(|s| &s.comm_resid));
    println!("max commutator residual (all columns): {:.2e}", worst(|s| &s.comm_resid_all));
    println!("max recursive/dense difference: {:.2e}", worst(|s| &s.oracle_diff));
    Ok(())
}
