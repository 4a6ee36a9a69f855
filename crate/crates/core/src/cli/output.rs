//! CSV and JSON emission.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use crate::experiments::{SweepAxis, SweepResult};
use crate::params::rad_to_hz;
use crate::sideband_solver::{Protocol, TransferSolution};
use crate::C64;

/// Full-precision, locale-independent number formatting (17 significant
/// digits).
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Sweep table. Columns: abscissa, η and S for each protocol, the N = 2
/// lower bound and the largest commutator residual over the protocols.
pub fn sweep_csv(sweep: &SweepResult) -> String {
    let axis = match sweep.axis.kind {
        SweepAxis::KappaM => "kappa_m_hz",
        SweepAxis::Omega => "omega_hz",
    };
    let mut out = format!("{axis},eta_const,S_const,eta_pd1,S_pd1,eta_pd2,S_pd2,lb_pd2,comm_resid\n");
    let get = |p: Protocol| sweep.series(p).expect("standard sweep protocols");
    let c = get(Protocol::Constant);
    let p1 = get(Protocol::Parametric { n: 1 });
    let p2 = get(Protocol::Parametric { n: 2 });
    for (i, x) in sweep.axis.values_hz.iter().enumerate() {
        let resid = c.comm_resid[i].max(p1.comm_resid[i]).max(p2.comm_resid[i]);
        let row = [
            *x,
            c.eta[i],
            c.s[i],
            p1.eta[i],
            p1.s[i],
            p2.eta[i],
            p2.s[i],
            p2.lower_bound[i],
            resid,
        ];
        let line: Vec<String> = row.iter().map(|v| num(*v)).collect();
        writeln!(out, "{}", line.join(",")).unwrap();
    }
    out
}

/// A complex matrix as nested `[re, im]` pairs, row-major.
pub fn matrix_json(m: &DMatrix<C64>) -> Value {
    Value::Array(
        m.row_iter()
            .map(|row| Value::Array(row.iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

#[derive(Serialize)]
struct SidebandJson {
    sign: String,
    k: usize,
    input_frequency_hz: f64,
    t: Value,
}

/// Transfer matrices with their row/column labels.
pub fn solution_json(sol: &TransferSolution) -> Value {
    let labels: Vec<String> = sol.layout.columns.iter().map(|c| c.to_string()).collect();
    let sidebands: Vec<SidebandJson> = sol
        .t_sideband
        .iter()
        .map(|b| SidebandJson {
            sign: b.sign.to_string(),
            k: b.k,
            input_frequency_hz: rad_to_hz(sol.sideband_frequency(b.sign, b.k)),
            t: matrix_json(&b.t),
        })
        .collect();
    json!({
        "protocol": sol.protocol,
        "probe_hz": rad_to_hz(sol.probe_omega),
        "omega_m_hz": rad_to_hz(sol.omega_m),
        "condition_estimate": sol.condition,
        "ports": labels,
        "t_central": matrix_json(&sol.t_central),
        "t_sideband": sidebands,
    })
}
