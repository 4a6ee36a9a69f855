//! Closed forms for the ideal transducer: symmetric, lossless
//! electromagnetic cavities (`κ_ex = κ`), pumped on the red sideband
//! (`Δ = ω_m`), probed at `ω = ω_m`, in the limit `κ_m → 0`.
//!
//! Everything is a function of `r = κ / 4ω_m`.

use serde::Serialize;

use crate::{Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IdealProtocol {
    Constant,
    ParametricN1,
    ParametricN2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdealCase {
    /// κ, rad/s.
    pub kappa: f64,
    /// ω_m, rad/s.
    pub omega_m: f64,
    pub protocol: IdealProtocol,
}

impl IdealCase {
    pub fn new(kappa: f64, omega_m: f64, protocol: IdealProtocol) -> Self {
        assert!(kappa > 0.0 && omega_m > 0.0, "ideal case needs positive κ and ω_m");
        Self {
            kappa,
            omega_m,
            protocol,
        }
    }

    /// `r = κ / 4ω_m`.
    pub fn ratio(&self) -> f64 {
        self.kappa / (4.0 * self.omega_m)
    }
}

/// `√(1 + r²)`, shared by the constant drive and the N = 2 parametric drive.
pub fn amplified_efficiency(r: f64) -> f64 {
    (1.0 + r * r).sqrt()
}

/// Transfer elements of the constant-drive ideal transducer at `ω_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantClosedForm {
    pub t_oe: C64,
    pub t_oo: C64,
    pub t_oe_conj: C64,
    pub t_oo_conj: C64,
    pub eta: f64,
}

/// `T_oe = −1 − ir`, `T_oo = −ir`, `T_oe' = T_oo' = −ir G/G*`,
/// `η = √(1 + r²)`. Only the phase of `g_eff` enters.
pub fn const_symmetric(case: &IdealCase, g_eff: C64) -> ConstantClosedForm {
    let r = case.ratio();
    let i = C64::i();
    let phase = if g_eff.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        g_eff / g_eff.conj()
    };
    let conj = -i * r * phase;
    ConstantClosedForm {
        t_oe: C64::new(-1.0, -r),
        t_oo: -i * r,
        t_oe_conj: conj,
        t_oo_conj: conj,
        eta: amplified_efficiency(r),
    }
}

/// Magnitudes of the relevant elements under parametric driving.
///
/// `v_oo_conj` and `v_oe_conj` live in `T_-[2]`, the matrix pairing the
/// output with inputs at `ω − 4ω_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParametricClosedForm {
    pub eta: f64,
    pub t_oe_conj: f64,
    pub t_oo: f64,
    pub t_oo_conj: f64,
    pub v_oo_conj: f64,
    pub v_oe_conj: f64,
}

/// N = 1: perfect transduction with every noise element zero.
/// N = 2: `η = √(1 + r²)` and `|T_oo| = |V_oo'| = |V_oe'| = r`.
pub fn pd_ideal(case: &IdealCase) -> ParametricClosedForm {
    let r = case.ratio();
    match case.protocol {
        IdealProtocol::ParametricN2 => ParametricClosedForm {
            eta: amplified_efficiency(r),
            t_oe_conj: 0.0,
            t_oo: r,
            t_oo_conj: 0.0,
            v_oo_conj: r,
            v_oe_conj: r,
        },
        _ => ParametricClosedForm {
            eta: 1.0,
            t_oe_conj: 0.0,
            t_oo: 0.0,
            t_oo_conj: 0.0,
            v_oo_conj: 0.0,
            v_oe_conj: 0.0,
        },
    }
}

/// Added noise of the ideal case:
/// constant `(5/2)r²/(1+r²)`, N = 1 zero, N = 2 `(3/2)r²/(1+r²)`.
pub fn ideal_added_noise(case: &IdealCase) -> f64 {
    let r2 = case.ratio().powi(2);
    match case.protocol {
        IdealProtocol::Constant => 2.5 * r2 / (1.0 + r2),
        IdealProtocol::ParametricN1 => 0.0,
        IdealProtocol::ParametricN2 => 1.5 * r2 / (1.0 + r2),
    }
}

/// Mechanical damping sequence `κ_m/2π` (Hz) used to approach `κ_m → 0`.
pub const KAPPA_M_SEQUENCE_HZ: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Value of the interpolating polynomial through `(x_i, y_i)` at `x = 0`
/// (Neville's scheme). With a geometric `x` sequence this is Richardson
/// extrapolation for an error expandable in integer powers of `x`.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[C64]) -> C64 {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (xs[i], xs[i + m]);
            p[i] = (p[i] * (-xj) + p[i + 1] * xi) / (xi - xj);
        }
    }
    p[0]
}

/// Zero-damping limit of a quantity, together with the raw sequence.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroDampingLimit {
    pub kappa_m_hz: Vec<f64>,
    pub values: Vec<C64>,
    pub limit: C64,
}

impl ZeroDampingLimit {
    /// Relative distance of the last raw value from the limit.
    pub fn last_raw_error(&self) -> f64 {
        let last = *self.values.last().expect("non-empty sequence");
        (last - self.limit).norm() / self.limit.norm().max(1.0)
    }
}

/// Evaluates `f(κ_m)` (κ_m in rad/s) along the sequence and extrapolates.
pub fn zero_damping_limit<F>(kappa_m_hz: &[f64], f: F) -> Result<ZeroDampingLimit>
where
    F: Fn(f64) -> Result<C64>,
{
    let values = kappa_m_hz
        .iter()
        .map(|&k| f(crate::params::hz_to_rad(k)))
        .collect::<Result<Vec<_>>>()?;
    let limit = extrapolate_to_zero(kappa_m_hz, &values);
    Ok(ZeroDampingLimit {
        kappa_m_hz: kappa_m_hz.to_vec(),
        values,
        limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::hz_to_rad;

    fn study(protocol: IdealProtocol) -> IdealCase {
        IdealCase::new(hz_to_rad(2.5e6), hz_to_rad(1.4732e6), protocol)
    }

    #[test]
    fn study_point_values() {
        let c = study(IdealProtocol::Constant);
        assert!((c.ratio() - 0.424247).abs() < 1e-6);
        let f = const_symmetric(&c, C64::new(0.3, -0.7));
        assert!((f.eta - 1.08627).abs() < 1e-5);
        assert!((f.t_oo.norm() - 0.42425).abs() < 1e-5);
        assert!((ideal_added_noise(&c) - 0.38133).abs() < 1e-5);
    }

    #[test]
    fn resolved_sideband_limit() {
        let c = IdealCase::new(1e-9, 1.0, IdealProtocol::Constant);
        let f = const_symmetric(&c, C64::new(1.0, 0.0));
        assert!((f.t_oe - C64::new(-1.0, 0.0)).norm() < 1e-9);
        assert!((f.eta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conjugate_magnitude_is_coupling_independent() {
        let c = study(IdealProtocol::Constant);
        let a = const_symmetric(&c, C64::new(2.0, 1.0));
        let b = const_symmetric(&c, C64::new(-0.1, 5.0));
        assert!((a.t_oe_conj.norm() - b.t_oe_conj.norm()).abs() < 1e-15);
        assert!((a.t_oe_conj - b.t_oe_conj).norm() > 1e-3);
    }

    #[test]
    fn n2_efficiency_equals_constant() {
        let c = study(IdealProtocol::Constant);
        let p = study(IdealProtocol::ParametricN2);
        assert_eq!(pd_ideal(&p).eta, const_symmetric(&c, C64::new(1.0, 0.0)).eta);
        assert_eq!(pd_ideal(&study(IdealProtocol::ParametricN1)).eta, 1.0);
    }

    #[test]
    fn neville_recovers_polynomial_limit() {
        let xs = [1e-1, 1e-2, 1e-3, 1e-4];
        let ys: Vec<C64> = xs
            .iter()
            .map(|&x| C64::new(2.0 + 3.0 * x - x * x + 0.5 * x * x * x, -1.0 + x))
            .collect();
        let l = extrapolate_to_zero(&xs, &ys);
        assert!((l - C64::new(2.0, -1.0)).norm() < 1e-13);
    }
}
