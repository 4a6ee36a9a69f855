//! Drift matrices, their Fourier blocks, the port coupling matrix `B` and
//! the classical drive vector.
//!
//! State ordering is `[a_o, a_e, a_o†, a_e†, a_m, a_m†]` (indices 0..6).

use std::fmt;

use nalgebra::{DMatrix, Vector6};
use serde::{Deserialize, Serialize};

use crate::linalg::{c, M2, M6};
use crate::params::{SteadyAmplitudes, ValidatedParams};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cavity {
    Optical,
    Electrical,
    Mechanical,
}

impl Cavity {
    pub fn tag(self) -> &'static str {
        match self {
            Cavity::Optical => "o",
            Cavity::Electrical => "e",
            Cavity::Mechanical => "m",
        }
    }

    /// Row of the state vector carrying this cavity's operator.
    pub fn state_index(self, quad: Quadrature) -> usize {
        let base = match self {
            Cavity::Optical => 0,
            Cavity::Electrical => 1,
            Cavity::Mechanical => return if quad == Quadrature::Annihilation { 4 } else { 5 },
        };
        match quad {
            Quadrature::Annihilation => base,
            Quadrature::Creation => base + 2,
        }
    }
}

/// Whether a column/row carries `a` or `a†`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    Annihilation,
    Creation,
}

impl Quadrature {
    pub fn flip(self) -> Self {
        match self {
            Quadrature::Annihilation => Quadrature::Creation,
            Quadrature::Creation => Quadrature::Annihilation,
        }
    }

    /// `+1` for `a`, `−1` for `a†` (the commutator weight).
    pub fn sign(self) -> f64 {
        match self {
            Quadrature::Annihilation => 1.0,
            Quadrature::Creation => -1.0,
        }
    }
}

impl fmt::Display for Quadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quadrature::Annihilation => "a",
            Quadrature::Creation => "a+",
        })
    }
}

/// One physical port of a cavity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Port {
    pub label: String,
    pub cavity: Cavity,
    /// Coupling rate κ_ij, rad/s.
    pub rate: f64,
}

/// One column of `B`, i.e. one input operator (equivalently one row of
/// the transfer matrix, since `T` is square).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub label: String,
    pub cavity: Cavity,
    pub quad: Quadrature,
    pub rate: f64,
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.quad {
            Quadrature::Annihilation => write!(f, "{}", self.label),
            Quadrature::Creation => write!(f, "{}'", self.label),
        }
    }
}

/// Port list and the matching block-diagonal `B = diag(D, D, M)`.
///
/// Columns are ordered: optical ports (`a`), electrical ports (`a`),
/// optical ports (`a†`), electrical ports (`a†`), mechanical (`a`),
/// mechanical (`a†`). Ports with zero coupling are omitted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortLayout {
    pub ports_o: Vec<Port>,
    pub ports_e: Vec<Port>,
    pub ports_m: Vec<Port>,
    /// Real 6 × n_columns coupling matrix with entries `√κ_ij`.
    #[serde(skip)]
    pub b_matrix: DMatrix<f64>,
    pub columns: Vec<Column>,
}

impl PortLayout {
    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    /// Number of electromagnetic ports `k_o + k_e`, i.e. the size of each
    /// electromagnetic block of `T`.
    pub fn n_em(&self) -> usize {
        self.ports_o.len() + self.ports_e.len()
    }

    /// Column of `B` (and of `T`) for a port label and quadrature.
    pub fn column_index(&self, label: &str, quad: Quadrature) -> Result<usize> {
        self.columns
            .iter()
            .position(|col| col.label == label && col.quad == quad)
            .ok_or_else(|| Error::UnknownPort(format!("{label} ({quad})")))
    }

    /// Column carrying the conjugate operator of column `j`.
    pub fn conjugate_column(&self, j: usize) -> usize {
        let col = &self.columns[j];
        self.column_index(&col.label, col.quad.flip())
            .expect("every port has both quadratures")
    }

    /// Block id of a column under the partition (EM `a`, EM `a†`,
    /// mechanical).
    pub fn column_block(&self, j: usize) -> usize {
        let col = &self.columns[j];
        match (col.cavity, col.quad) {
            (Cavity::Mechanical, _) => 2,
            (_, Quadrature::Annihilation) => 0,
            (_, Quadrature::Creation) => 1,
        }
    }

    /// `B` promoted to complex entries.
    pub fn b_complex(&self) -> DMatrix<C64> {
        self.b_matrix.map(|x| c(x, 0.0))
    }

    /// Sum of squared `B` entries over the columns of one cavity and one
    /// quadrature. Equals κ_i when every port is present.
    pub fn coupling_sum(&self, cavity: Cavity, quad: Quadrature) -> f64 {
        let row = cavity.state_index(quad);
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, col)| col.cavity == cavity && col.quad == quad)
            .map(|(j, _)| self.b_matrix[(row, j)].powi(2))
            .sum()
    }
}

/// Builds the default layout: external and internal port for each
/// electromagnetic cavity and a single mechanical port.
pub fn build_port_layout(p: &ValidatedParams) -> PortLayout {
    let keep = |label: &str, cavity: Cavity, rate: f64| {
        (rate > 0.0).then(|| Port {
            label: label.to_string(),
            cavity,
            rate,
        })
    };
    let ports_o: Vec<Port> = [
        keep("o.ex", Cavity::Optical, p.kappa_o_ex),
        keep("o.int", Cavity::Optical, p.kappa_o_int()),
    ]
    .into_iter()
    .flatten()
    .collect();
    let ports_e: Vec<Port> = [
        keep("e.ex", Cavity::Electrical, p.kappa_e_ex),
        keep("e.int", Cavity::Electrical, p.kappa_e_int()),
    ]
    .into_iter()
    .flatten()
    .collect();
    let ports_m: Vec<Port> = keep("m", Cavity::Mechanical, p.kappa_m_ex)
        .into_iter()
        .collect();

    let mut columns = Vec::new();
    for quad in [Quadrature::Annihilation, Quadrature::Creation] {
        for port in ports_o.iter().chain(&ports_e) {
            columns.push(Column {
                label: port.label.clone(),
                cavity: port.cavity,
                quad,
                rate: port.rate,
            });
        }
    }
    for port in &ports_m {
        for quad in [Quadrature::Annihilation, Quadrature::Creation] {
            columns.push(Column {
                label: port.label.clone(),
                cavity: port.cavity,
                quad,
                rate: port.rate,
            });
        }
    }

    let mut b_matrix = DMatrix::zeros(6, columns.len());
    for (j, col) in columns.iter().enumerate() {
        b_matrix[(col.cavity.state_index(col.quad), j)] = col.rate.sqrt();
    }

    PortLayout {
        ports_o,
        ports_e,
        ports_m,
        b_matrix,
        columns,
    }
}

/// The drift matrix of the constant-drive problem.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    pub a: M6,
    pub omega_m: f64,
}

/// Diagonal of the drift matrix (independent of the pump).
pub fn drift_diagonal(p: &ValidatedParams) -> [C64; 6] {
    [
        c(-0.5 * p.kappa_o, -p.delta_o),
        c(-0.5 * p.kappa_e, -p.delta_e),
        c(-0.5 * p.kappa_o, p.delta_o),
        c(-0.5 * p.kappa_e, p.delta_e),
        c(-0.5 * p.kappa_m, -p.omega_m),
        c(-0.5 * p.kappa_m, p.omega_m),
    ]
}

/// Places the coupling entries for amplitudes `(G_o, G_e)`.
fn coupling_entries(a: &mut M6, go: C64, ge: C64, lower: bool, upper: bool) {
    let i = C64::i();
    // electromagnetic rows (driven by a_m + a_m†)
    if lower {
        for col in [4, 5] {
            a[(0, col)] = -i * go;
            a[(1, col)] = -i * ge;
        }
        a[(4, 2)] = -i * go;
        a[(4, 3)] = -i * ge;
        a[(5, 2)] = i * go;
        a[(5, 3)] = i * ge;
    }
    if upper {
        for col in [4, 5] {
            a[(2, col)] = i * go.conj();
            a[(3, col)] = i * ge.conj();
        }
        a[(4, 0)] = -i * go.conj();
        a[(4, 1)] = -i * ge.conj();
        a[(5, 0)] = i * go.conj();
        a[(5, 1)] = i * ge.conj();
    }
}

/// Full 6×6 drift matrix `A` for constant couplings `G_i`.
pub fn build_drift_constant(p: &ValidatedParams, amps: &SteadyAmplitudes) -> DriftMatrix {
    let mut a = M6::from_diagonal(&Vector6::from(drift_diagonal(p)));
    coupling_entries(&mut a, amps.g_eff_o, amps.g_eff_e, true, true);
    DriftMatrix {
        a,
        omega_m: p.omega_m,
    }
}

/// Fourier blocks `A(t) = A_d + A_- e^{…} + A_+ e^{…}` for the parametric
/// drive, with the 2×2 coupling blocks `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandMatrixSet {
    pub a_d: M6,
    pub a_minus: M6,
    pub a_plus: M6,
    /// `A_-` block (rows `a`, cols mechanics).
    pub q_am: M2,
    /// `A_-` block (rows mechanics, cols `a†`).
    pub q_mc: M2,
    /// `A_+` block (rows `a†`, cols mechanics).
    pub q_cm: M2,
    /// `A_+` block (rows mechanics, cols `a`).
    pub q_ma: M2,
    pub omega_m: f64,
}

impl SidebandMatrixSet {
    pub fn diagonal(&self) -> [C64; 6] {
        std::array::from_fn(|k| self.a_d[(k, k)])
    }

    /// `true` when both sideband blocks vanish.
    pub fn is_decoupled(&self) -> bool {
        self.a_minus.iter().chain(self.a_plus.iter()).all(|z| *z == c(0.0, 0.0))
    }
}

/// Fourier blocks of the parametric drift matrix from the envelopes `G^s`.
pub fn build_drift_fourier(p: &ValidatedParams, amps: &SteadyAmplitudes) -> SidebandMatrixSet {
    let a_d = M6::from_diagonal(&Vector6::from(drift_diagonal(p)));
    let (go, ge) = (amps.g_eff_o, amps.g_eff_e);
    let mut a_minus = M6::zeros();
    let mut a_plus = M6::zeros();
    coupling_entries(&mut a_minus, go, ge, true, false);
    coupling_entries(&mut a_plus, go, ge, false, true);

    let q_am = a_minus.fixed_view::<2, 2>(0, 4).into_owned();
    let q_mc = a_minus.fixed_view::<2, 2>(4, 2).into_owned();
    let q_cm = a_plus.fixed_view::<2, 2>(2, 4).into_owned();
    let q_ma = a_plus.fixed_view::<2, 2>(4, 0).into_owned();
    debug_assert_eq!(q_cm, q_am.map(|z| z.conj()));
    debug_assert_eq!(q_ma, -q_mc.map(|z| z.conj()));

    SidebandMatrixSet {
        a_d,
        a_minus,
        a_plus,
        q_am,
        q_mc,
        q_cm,
        q_ma,
        omega_m: p.omega_m,
    }
}

/// Classical inhomogeneous term of the fluctuation equations. Only the
/// mechanical rows are nonzero. It feeds the DC response alone and is not
/// used by the frequency-domain solvers.
pub fn build_drive_vector(p: &ValidatedParams, amps: &SteadyAmplitudes) -> Vector6<C64> {
    let power = p.g_o * amps.alpha_o.norm_sqr() + p.g_e * amps.alpha_e.norm_sqr();
    let v4 = -C64::i() * power;
    let z = c(0.0, 0.0);
    Vector6::new(z, z, z, z, v4, -v4)
}

/// State index carrying the conjugate operator (`a ↔ a†`).
pub const fn conjugate_state(i: usize) -> usize {
    match i {
        0 => 2,
        1 => 3,
        2 => 0,
        3 => 1,
        4 => 5,
        _ => 4,
    }
}

/// Applies the conjugate pairing to both indices: `(P M P)`.
pub fn pair_conjugate(m: &M6) -> M6 {
    M6::from_fn(|r, col| m[(conjugate_state(r), conjugate_state(col))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{hz_to_rad, steady_amplitude, DriveProtocol, SystemParams};

    fn reference_device() -> ValidatedParams {
        SystemParams::reference_device().validate().unwrap()
    }

    #[test]
    fn reference_device_layout() {
        let p = reference_device();
        let l = build_port_layout(&p);
        assert_eq!(l.n_columns(), 10);
        assert_eq!(l.b_matrix.shape(), (6, 10));
        let o_ex = l.column_index("o.ex", Quadrature::Annihilation).unwrap();
        let o_int = l.column_index("o.int", Quadrature::Annihilation).unwrap();
        assert!((l.b_matrix[(0, o_ex)] - hz_to_rad(1.1e6).sqrt()).abs() < 1e-9);
        assert!((l.b_matrix[(0, o_int)] - hz_to_rad(1.0e6).sqrt()).abs() < 1e-6);
        assert_eq!(l.column_index("m", Quadrature::Creation).unwrap(), 9);
    }

    #[test]
    fn lossless_ports_are_elided() {
        let p = SystemParams::symmetric_study(1.0).validate().unwrap();
        let l = build_port_layout(&p);
        assert_eq!(l.n_columns(), 6);
        assert!(l.column_index("o.int", Quadrature::Annihilation).is_err());
    }

    #[test]
    fn b_is_block_diagonal() {
        let l = build_port_layout(&reference_device());
        for (j, col) in l.columns.iter().enumerate() {
            for r in 0..6 {
                if r != col.cavity.state_index(col.quad) {
                    assert_eq!(l.b_matrix[(r, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn coupling_sums_equal_total_decay() {
        let p = reference_device();
        let l = build_port_layout(&p);
        for quad in [Quadrature::Annihilation, Quadrature::Creation] {
            for (cav, kappa) in [
                (Cavity::Optical, p.kappa_o),
                (Cavity::Electrical, p.kappa_e),
                (Cavity::Mechanical, p.kappa_m),
            ] {
                let s = l.coupling_sum(cav, quad);
                assert!((s - kappa).abs() <= 1e-14 * kappa, "{cav:?} {s} {kappa}");
            }
        }
    }

    #[test]
    fn decoupled_drift_is_diagonal() {
        let p = reference_device();
        let a = steady_amplitude(&p, &DriveProtocol::constant(0.0)).unwrap();
        let d = build_drift_constant(&p, &a);
        for r in 0..6 {
            for col in 0..6 {
                if r != col {
                    assert_eq!(d.a[(r, col)], c(0.0, 0.0));
                }
            }
        }
        assert_eq!(d.a[(4, 4)], c(-0.5 * p.kappa_m, -p.omega_m));
        assert_eq!(d.a[(3, 3)], c(-0.5 * p.kappa_e, p.delta_e));
    }

    #[test]
    fn drift_conjugation_symmetry() {
        let p = reference_device();
        let a = steady_amplitude(&p, &DriveProtocol::constant(hz_to_rad(300e6))).unwrap();
        let d = build_drift_constant(&p, &a);
        assert_eq!(pair_conjugate(&d.a), d.a.map(|z| z.conj()));
    }

    #[test]
    fn fourier_blocks() {
        let p = reference_device();
        let a = steady_amplitude(&p, &DriveProtocol::parametric(hz_to_rad(300e6), 2)).unwrap();
        let s = build_drift_fourier(&p, &a);
        let full = build_drift_constant(&p, &a);
        assert_eq!(s.a_d + s.a_minus + s.a_plus, full.a);
        assert_eq!(s.q_cm, s.q_am.map(|z| z.conj()));
        assert_eq!(s.q_ma, -s.q_mc.map(|z| z.conj()));
        assert_eq!(pair_conjugate(&s.a_minus), s.a_plus.map(|z| z.conj()));
    }

    #[test]
    fn zero_pattern_of_sideband_blocks() {
        let p = reference_device();
        let a = steady_amplitude(&p, &DriveProtocol::parametric(hz_to_rad(300e6), 2)).unwrap();
        let s = build_drift_fourier(&p, &a);
        let minus: &[(usize, usize)] = &[(0, 4), (0, 5), (1, 4), (1, 5), (4, 2), (4, 3), (5, 2), (5, 3)];
        let plus: &[(usize, usize)] = &[(2, 4), (2, 5), (3, 4), (3, 5), (4, 0), (4, 1), (5, 0), (5, 1)];
        for r in 0..6 {
            for col in 0..6 {
                assert_eq!(s.a_minus[(r, col)] != c(0.0, 0.0), minus.contains(&(r, col)));
                assert_eq!(s.a_plus[(r, col)] != c(0.0, 0.0), plus.contains(&(r, col)));
            }
        }
        let z = steady_amplitude(&p, &DriveProtocol::parametric(0.0, 2)).unwrap();
        assert!(build_drift_fourier(&p, &z).is_decoupled());
    }

    #[test]
    fn drive_vector() {
        let p = reference_device();
        let zero = steady_amplitude(&p, &DriveProtocol::constant(0.0)).unwrap();
        assert!(build_drive_vector(&p, &zero).iter().all(|z| *z == c(0.0, 0.0)));
        let a = steady_amplitude(&p, &DriveProtocol::constant(hz_to_rad(100e6))).unwrap();
        let v = build_drive_vector(&p, &a);
        assert!(v.iter().take(4).all(|z| *z == c(0.0, 0.0)));
        assert_eq!(v[5], -v[4]);
        let expected = p.g_o * a.alpha_o.norm_sqr() + p.g_e * a.alpha_e.norm_sqr();
        assert_eq!(v[4], c(0.0, -expected));
    }
}
