//! Fine-tune the pump amplitude so the realistic transducer converts with
//! unit efficiency at ω = ω_m.

use xduct::experiments::tune_unity_efficiency;
use xduct::sideband_solver::Protocol;
use xduct::SystemParams;

fn main() -> xduct::Result<()> {
    let base = SystemParams::reference_device();
    for n in [1, 2] {
        let r = tune_unity_efficiency(base, Protocol::Parametric { n }, (200e6, 800e6))?;
        println!(
            "N = {n}: Ω*/2π = {:.6} MHz  η − 1 = {:+.2e}  S = {:.4}  ({} iterations)",
            r.omega_drive_hz / 1e6,
            r.eta - 1.0,
            r.report.s_added,
            r.iterations
        );
    }
    // the constant pump never reaches unity in this range
    match tune_unity_efficiency(base, Protocol::Constant, (200e6, 800e6)) {
        Ok(r) => println!("constant: Ω*/2π = {:.6} MHz", r.omega_drive_hz / 1e6),
        Err(e) => println!("constant: {e}"),
    }
    Ok(())
}
