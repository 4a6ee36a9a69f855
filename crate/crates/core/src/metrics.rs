//! Efficiency, added noise and structural diagnostics of a solved transducer.
//!
//! Noise bookkeeping assumes vacuum on every noise input. Inputs are read off
//! the solution's own column list and sideband matrices, so nothing here
//! depends on which blocks happen to vanish.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::linalg;
use crate::matrix_builder::{Cavity, Column, Quadrature};
use crate::sideband_solver::{Protocol, SidebandSign, TransferSolution};
use crate::{Result, C64};

/// Signal input port (electrical, external).
pub const SIGNAL_IN: &str = "e.ex";
/// Signal output port (optical, external).
pub const SIGNAL_OUT: &str = "o.ex";

/// Weight of the conjugate-signal term `|T_{o,e'}|²`.
pub const CONJUGATE_SIGNAL_WEIGHT: f64 = 1.5;
/// Weight of every other vacuum input.
pub const VACUUM_WEIGHT: f64 = 0.5;

/// `η = |T_{out,in}|` between the annihilation operators of two ports.
pub fn efficiency(sol: &TransferSolution, out_port: &str, in_port: &str) -> Result<f64> {
    Ok(sol
        .element(
            (out_port, Quadrature::Annihilation),
            (in_port, Quadrature::Annihilation),
        )?
        .norm())
}

/// Mechanical inputs only exist at positive frequency for `a_m` and at
/// negative frequency for `a_m†`; the opposite components are dropped.
pub fn mechanical_input_exists(col: &Column, nu: f64) -> bool {
    if col.cavity != Cavity::Mechanical {
        return true;
    }
    match col.quad {
        Quadrature::Annihilation => nu >= 0.0,
        Quadrature::Creation => nu <= 0.0,
    }
}

/// One input's contribution to `η²S`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseTerm {
    /// Input label, primed for creation operators (`"e.int'"`).
    pub source: String,
    /// Signed sideband order: 0 for the probe frequency, ±k for `ω ± 2kω_m`.
    pub sideband: i64,
    /// Input frequency, rad/s.
    pub frequency: f64,
    pub transfer_sq: f64,
    /// 3/2 for the conjugate signal, 1/2 otherwise, 0 if dropped.
    pub weight: f64,
    pub contribution: f64,
    /// `false` when removed by the mechanical frequency-sign rule.
    pub kept: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseReport {
    pub protocol: Protocol,
    pub probe_omega: f64,
    pub eta: f64,
    /// `S`, or `+∞` when `η = 0` (see `eta_zero`).
    pub s_added: f64,
    pub eta_zero: bool,
    pub s_lower_bound: f64,
    pub r_squared: f64,
    /// `|Σ ±|T_{o,j}|² − 1|` over the kept inputs.
    pub commutator_residual: f64,
    /// `Σ |T|²` of the inputs removed by the sign rule. A large value next
    /// to a large commutator residual means the dropped mechanical terms are
    /// not negligible at this point.
    pub dropped_weight: f64,
    pub term_breakdown: Vec<NoiseTerm>,
}

struct Terms {
    eta: f64,
    conj_sq: f64,
    terms: Vec<NoiseTerm>,
    commutator_sum: f64,
}

fn label(col: &Column) -> String {
    col.to_string()
}

fn collect_terms(sol: &TransferSolution, signal_in: &str, signal_out: &str) -> Result<Terms> {
    let layout = &sol.layout;
    let row = layout.column_index(signal_out, Quadrature::Annihilation)?;
    let sig = layout.column_index(signal_in, Quadrature::Annihilation)?;
    let sig_c = layout.column_index(signal_in, Quadrature::Creation)?;

    let t_sig = sol.t_central[(row, sig)];
    let eta = t_sig.norm();
    let conj_sq = sol.t_central[(row, sig_c)].norm_sqr();
    let mut commutator_sum = eta * eta - conj_sq;

    let mut terms = vec![NoiseTerm {
        source: label(&layout.columns[sig_c]),
        sideband: 0,
        frequency: sol.probe_omega,
        transfer_sq: conj_sq,
        weight: CONJUGATE_SIGNAL_WEIGHT,
        contribution: CONJUGATE_SIGNAL_WEIGHT * conj_sq,
        kept: true,
    }];

    let mut visit = |m: &DMatrix<C64>, sideband: i64, nu: f64, skip: &[usize]| {
        for (j, col) in layout.columns.iter().enumerate() {
            if skip.contains(&j) {
                continue;
            }
            let sq = m[(row, j)].norm_sqr();
            let kept = mechanical_input_exists(col, nu);
            let weight = if kept { VACUUM_WEIGHT } else { 0.0 };
            if kept {
                commutator_sum += col.quad.sign() * sq;
            }
            terms.push(NoiseTerm {
                source: label(col),
                sideband,
                frequency: nu,
                transfer_sq: sq,
                weight,
                contribution: weight * sq,
                kept,
            });
        }
    };

    visit(&sol.t_central, 0, sol.probe_omega, &[sig, sig_c]);
    for b in &sol.t_sideband {
        let order = match b.sign {
            SidebandSign::Plus => b.k as i64,
            SidebandSign::Minus => -(b.k as i64),
        };
        visit(&b.t, order, sol.sideband_frequency(b.sign, b.k), &[]);
    }

    Ok(Terms {
        eta,
        conj_sq,
        terms,
        commutator_sum,
    })
}

/// `(3/2)R² + |(1 − η²)/(2η²) + R²/2|`.
pub fn noise_lower_bound(eta: f64, r_squared: f64) -> f64 {
    let e2 = eta * eta;
    1.5 * r_squared + ((1.0 - e2) / (2.0 * e2) + 0.5 * r_squared).abs()
}

/// Added noise referred to the input of the `signal_in → signal_out` path.
pub fn added_noise(sol: &TransferSolution, signal_in: &str, signal_out: &str) -> Result<NoiseReport> {
    let Terms {
        eta,
        conj_sq,
        terms,
        commutator_sum,
    } = collect_terms(sol, signal_in, signal_out)?;
    let total: f64 = terms.iter().map(|t| t.contribution).sum();
    let dropped_weight = terms.iter().filter(|t| !t.kept).map(|t| t.transfer_sq).sum();
    let eta_zero = eta == 0.0;
    let (s_added, r_squared, s_lower_bound) = if eta_zero {
        (f64::INFINITY, f64::INFINITY, f64::INFINITY)
    } else {
        let e2 = eta * eta;
        let r2 = conj_sq / e2;
        (total / e2, r2, noise_lower_bound(eta, r2))
    };
    Ok(NoiseReport {
        protocol: sol.protocol,
        probe_omega: sol.probe_omega,
        eta,
        s_added,
        eta_zero,
        s_lower_bound,
        r_squared,
        commutator_residual: (commutator_sum - 1.0).abs(),
        dropped_weight,
        term_breakdown: terms,
    })
}

/// Commutator bookkeeping for the default output `o.ex`.
pub fn commutator_residual(sol: &TransferSolution) -> Result<f64> {
    let t = collect_terms(sol, SIGNAL_IN, SIGNAL_OUT)?;
    Ok((t.commutator_sum - 1.0).abs())
}

/// Same sum with every column kept, i.e. without the mechanical sign rule.
/// This is the exact unitarity identity of the truncated linear system.
pub fn commutator_residual_all_columns(sol: &TransferSolution, out_port: &str) -> Result<f64> {
    let layout = &sol.layout;
    let row = layout.column_index(out_port, Quadrature::Annihilation)?;
    let mut sum = 0.0;
    let mats = std::iter::once(&sol.t_central).chain(sol.t_sideband.iter().map(|b| &b.t));
    for m in mats {
        for (j, col) in layout.columns.iter().enumerate() {
            sum += col.quad.sign() * m[(row, j)].norm_sqr();
        }
    }
    Ok((sum - 1.0).abs())
}

/// Elements of the `o.ex` output row that the ideal-case closed forms talk
/// about. `v_*` come from `T_-[2]` (inputs at `ω − 4ω_m`) and are zero when
/// that matrix is absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalRow {
    pub t_oe: C64,
    pub t_oe_conj: C64,
    pub t_oo: C64,
    pub t_oo_conj: C64,
    pub v_oe: C64,
    pub v_oe_conj: C64,
    pub v_oo_conj: C64,
}

pub fn signal_row(sol: &TransferSolution) -> Result<SignalRow> {
    let l = &sol.layout;
    let a = Quadrature::Annihilation;
    let cr = Quadrature::Creation;
    let row = l.column_index(SIGNAL_OUT, a)?;
    let col = |label: &str, q: Quadrature| l.column_index(label, q);
    let t = |label: &str, q: Quadrature| -> Result<C64> { Ok(sol.t_central[(row, col(label, q)?)]) };
    let v = |label: &str, q: Quadrature| -> Result<C64> {
        Ok(match sol.sideband(SidebandSign::Minus, 2) {
            Some(m) => m[(row, col(label, q)?)],
            None => C64::new(0.0, 0.0),
        })
    };
    Ok(SignalRow {
        t_oe: t(SIGNAL_IN, a)?,
        t_oe_conj: t(SIGNAL_IN, cr)?,
        t_oo: t(SIGNAL_OUT, a)?,
        t_oo_conj: t(SIGNAL_OUT, cr)?,
        v_oe: v(SIGNAL_IN, a)?,
        v_oe_conj: v(SIGNAL_IN, cr)?,
        v_oo_conj: v(SIGNAL_OUT, cr)?,
    })
}

/// A diagnostic value, or a marker that the check does not apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Diagnostic {
    Value(f64),
    NotApplicable,
}

impl Diagnostic {
    pub fn value(self) -> Option<f64> {
        match self {
            Diagnostic::Value(v) => Some(v),
            Diagnostic::NotApplicable => None,
        }
    }
}

/// Structural diagnostics over a family of solutions at one point, all
/// values relative to `max(1, ‖T‖_∞)`.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    /// Largest central `T` entry outside the (EM `a`, EM `a†`, mechanical)
    /// blocks.
    pub off_block: Diagnostic,
    /// Largest sideband entry for k > 2.
    pub tail_sideband: Diagnostic,
    /// Largest change of `T`, `T_±[1]`, `T_±[2]` relative to N = 2, over N > 2.
    pub n_variation: Diagnostic,
    /// Change between N = 1 and N = 2 (expected nonzero).
    pub n1_variation: Diagnostic,
    /// Largest entry of an electromagnetic output row of `T_±[1]` in an EM
    /// column, or of `T_±[2]` in a mechanical column.
    pub sideband_pattern: Diagnostic,
}

fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    linalg::max_abs((a - b).iter())
}

/// Largest off-block entry of `T` under the column partition.
pub fn off_block_magnitude(sol: &TransferSolution) -> f64 {
    let l = &sol.layout;
    let n = l.n_columns();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for j in 0..n {
            if l.column_block(r) != l.column_block(j) {
                worst = worst.max(sol.t_central[(r, j)].norm());
            }
        }
    }
    worst
}

/// Largest entry violating the sideband coupling pattern on EM output rows.
pub fn sideband_pattern_violation(sol: &TransferSolution) -> f64 {
    let l = &sol.layout;
    let mut worst: f64 = 0.0;
    for b in sol.t_sideband.iter().filter(|b| b.k <= 2) {
        for r in (0..l.n_columns()).filter(|&r| l.column_block(r) != 2) {
            for j in 0..l.n_columns() {
                let mech = l.column_block(j) == 2;
                let forbidden = if b.k == 1 { !mech } else { mech };
                if forbidden {
                    worst = worst.max(b.t[(r, j)].norm());
                }
            }
        }
    }
    worst
}

/// Largest entry of any sideband matrix with k > 2.
pub fn tail_magnitude(sol: &TransferSolution) -> f64 {
    sol.t_sideband
        .iter()
        .filter(|b| b.k > 2)
        .map(|b| linalg::max_abs(b.t.iter()))
        .fold(0.0, f64::max)
}

/// Largest elementwise difference of `T`, `T_±[1]`, `T_±[2]` between two
/// solutions (sideband matrices missing from either side are skipped).
pub fn solution_difference(a: &TransferSolution, b: &TransferSolution) -> f64 {
    let mut worst = max_diff(&a.t_central, &b.t_central);
    for sign in SidebandSign::BOTH {
        for k in 1..=2 {
            if let (Some(x), Some(y)) = (a.sideband(sign, k), b.sideband(sign, k)) {
                worst = worst.max(max_diff(x, y));
            }
        }
    }
    worst
}

/// Structural diagnostics for solutions at one `(params, ω)` but different
/// truncation orders. Tail sidebands are only visible in dense solutions.
pub fn structure_report(family: &[TransferSolution]) -> StructureReport {
    let na = StructureReport {
        off_block: Diagnostic::NotApplicable,
        tail_sideband: Diagnostic::NotApplicable,
        n_variation: Diagnostic::NotApplicable,
        n1_variation: Diagnostic::NotApplicable,
        sideband_pattern: Diagnostic::NotApplicable,
    };
    let order = |s: &TransferSolution| match s.protocol {
        Protocol::Parametric { n } => Some(n),
        Protocol::Constant => None,
    };
    let pd: Vec<(usize, &TransferSolution)> =
        family.iter().filter_map(|s| order(s).map(|n| (n, s))).collect();
    if pd.is_empty() {
        return na;
    }
    let scale = pd.iter().map(|(_, s)| s.scale()).fold(1.0, f64::max);

    let off_block = pd.iter().map(|(_, s)| off_block_magnitude(s)).fold(0.0, f64::max) / scale;
    let pattern = pd
        .iter()
        .map(|(_, s)| sideband_pattern_violation(s))
        .fold(0.0, f64::max)
        / scale;
    let has_tail = pd.iter().any(|(_, s)| s.t_sideband.iter().any(|b| b.k > 2));
    let tail_sideband = if has_tail {
        let worst = pd.iter().map(|(_, s)| tail_magnitude(s)).fold(0.0, f64::max);
        Diagnostic::Value(worst / scale)
    } else {
        Diagnostic::NotApplicable
    };
    let reference = pd.iter().find(|(n, _)| *n == 2).map(|(_, s)| *s);
    let (n_variation, n1_variation) = match reference {
        None => (Diagnostic::NotApplicable, Diagnostic::NotApplicable),
        Some(r) => {
            let higher: Vec<f64> = pd
                .iter()
                .filter(|(n, _)| *n > 2)
                .map(|(_, s)| solution_difference(s, r))
                .collect();
            let nv = if higher.is_empty() {
                Diagnostic::NotApplicable
            } else {
                Diagnostic::Value(higher.into_iter().fold(0.0, f64::max) / scale)
            };
            let n1 = pd
                .iter()
                .find(|(n, _)| *n == 1)
                .map(|(_, s)| Diagnostic::Value(max_diff(&s.t_central, &r.t_central) / scale))
                .unwrap_or(Diagnostic::NotApplicable);
            (nv, n1)
        }
    };
    StructureReport {
        off_block: Diagnostic::Value(off_block),
        tail_sideband,
        n_variation,
        n1_variation,
        sideband_pattern: Diagnostic::Value(pattern),
    }
}
