//! Frequency-domain transfer matrices.
//!
//! * constant drive: `T = Bᵀ(−iωI − A)⁻¹B − I`;
//! * parametric drive: recursive elimination of the sidebands
//!   `ω ± 2kω_m`, k = 1..N, using the 2×2 block structure of every
//!   intermediate matrix;
//! * [`dense_oracle`]: one LU solve of the whole truncated extended system,
//!   sharing no code with the recursion.
//!
//! The classical drive vector only feeds the DC response and is ignored here.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, c, BlockDiag, M2, M6};
use crate::matrix_builder::{DriftMatrix, PortLayout, Quadrature, SidebandMatrixSet};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Protocol {
    Constant,
    Parametric { n: usize },
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::Constant => f.write_str("constant"),
            Protocol::Parametric { n } => write!(f, "parametric(N={n})"),
        }
    }
}

/// Which side of the probe frequency a sideband sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SidebandSign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

impl SidebandSign {
    pub const BOTH: [SidebandSign; 2] = [SidebandSign::Minus, SidebandSign::Plus];

    pub fn value(self) -> f64 {
        match self {
            SidebandSign::Minus => -1.0,
            SidebandSign::Plus => 1.0,
        }
    }
}

impl fmt::Display for SidebandSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SidebandSign::Minus => "-",
            SidebandSign::Plus => "+",
        })
    }
}

/// Frequency `ω ± 2kω_m` of sideband `(sign, k)`.
pub fn sideband_frequency(omega: f64, omega_m: f64, sign: SidebandSign, k: usize) -> f64 {
    omega + sign.value() * 2.0 * k as f64 * omega_m
}

/// The chains `X_±[k]`, `Ξ_±[k]` for k = 1..N (stored at index k−1).
#[derive(Debug, Clone)]
pub struct RecursionChain {
    pub x_plus: Vec<BlockDiag>,
    pub x_minus: Vec<BlockDiag>,
    pub xi_plus: Vec<BlockDiag>,
    pub xi_minus: Vec<BlockDiag>,
    pub probe_omega: f64,
    /// Largest 2×2 block condition number met along both chains.
    pub condition: f64,
}

impl RecursionChain {
    pub fn n(&self) -> usize {
        self.x_plus.len()
    }

    pub fn x(&self, sign: SidebandSign, k: usize) -> &BlockDiag {
        match sign {
            SidebandSign::Plus => &self.x_plus[k - 1],
            SidebandSign::Minus => &self.x_minus[k - 1],
        }
    }

    pub fn xi(&self, sign: SidebandSign, k: usize) -> &BlockDiag {
        match sign {
            SidebandSign::Plus => &self.xi_plus[k - 1],
            SidebandSign::Minus => &self.xi_minus[k - 1],
        }
    }
}

/// `Ξ = A_± X A_∓` evaluated block by block.
///
/// `Ξ_+ = diag(0, Q_cm X₃ Q_mc, Q_ma X₁ Q_am)` and
/// `Ξ_- = diag(Q_am X₃ Q_ma, 0, Q_mc X₂ Q_cm)`.
pub fn xi_from_x(mats: &SidebandMatrixSet, sign: SidebandSign, x: &BlockDiag) -> BlockDiag {
    let [x1, x2, x3] = &x.blocks;
    let zero = M2::zeros();
    let blocks = match sign {
        SidebandSign::Plus => [
            zero,
            mats.q_cm * x3 * mats.q_mc,
            mats.q_ma * x1 * mats.q_am,
        ],
        SidebandSign::Minus => [
            mats.q_am * x3 * mats.q_ma,
            zero,
            mats.q_mc * x2 * mats.q_cm,
        ],
    };
    BlockDiag { blocks }
}

fn check_damped(mats: &SidebandMatrixSet) -> Result<()> {
    // Re A_d[4,4] = −κ_m/2
    if mats.a_d[(4, 4)].re >= 0.0 {
        return Err(Error::UndampedMechanics);
    }
    Ok(())
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDrive("n_sidebands must be at least 1".into()));
    }
    Ok(())
}

/// Builds both sideband chains from the truncation boundary
/// `X_±[N] = (−i(ω ± 2Nω_m)I − A_d)⁻¹` down to k = 1.
pub fn build_recursion(mats: &SidebandMatrixSet, omega: f64, n: usize) -> Result<RecursionChain> {
    check_order(n)?;
    check_damped(mats)?;
    let a_d = BlockDiag::from_diagonal(&mats.diagonal());
    let mut condition: f64 = 1.0;
    let mut chains: [(Vec<BlockDiag>, Vec<BlockDiag>); 2] = Default::default();

    for (slot, sign) in SidebandSign::BOTH.into_iter().enumerate() {
        let mut xs = vec![BlockDiag::zero(); n];
        let mut xis = vec![BlockDiag::zero(); n];
        let mut xi_above = BlockDiag::zero();
        for k in (1..=n).rev() {
            let nu = sideband_frequency(omega, mats.omega_m, sign, k);
            let m = BlockDiag::scalar(c(0.0, -nu)).sub(&a_d).sub(&xi_above);
            let (x, cond) = m
                .inverse()
                .map_err(|block| Error::SingularBlock { sign, k, block })?;
            condition = condition.max(cond);
            xi_above = xi_from_x(mats, sign, &x);
            xs[k - 1] = x;
            xis[k - 1] = xi_above;
        }
        chains[slot] = (xs, xis);
    }
    let [(x_minus, xi_minus), (x_plus, xi_plus)] = chains;
    if condition > linalg::WARN_CONDITION {
        log::warn!("sideband recursion at ω = {omega:.6e}: block condition {condition:.3e}");
    }
    Ok(RecursionChain {
        x_plus,
        x_minus,
        xi_plus,
        xi_minus,
        probe_omega: omega,
        condition,
    })
}

/// One sideband transfer matrix `T_±[k]`, pairing the output at `ω` with
/// inputs at `ω ± 2kω_m`.
#[derive(Debug, Clone)]
pub struct SidebandBlock {
    pub sign: SidebandSign,
    pub k: usize,
    pub t: DMatrix<C64>,
}

#[derive(Debug, Clone)]
pub struct TransferSolution {
    /// `T(ω)`, rows = outputs, columns = inputs, both in layout order.
    pub t_central: DMatrix<C64>,
    /// Sideband matrices; empty for constant driving.
    pub t_sideband: Vec<SidebandBlock>,
    /// `X = (−iω − A_d − Ξ_-[1] − Ξ_+[1])⁻¹`, or `(−iω − A)⁻¹`.
    pub x_central: M6,
    pub layout: PortLayout,
    pub probe_omega: f64,
    pub omega_m: f64,
    pub protocol: Protocol,
    /// Largest condition number of any matrix inverted for this solve.
    pub condition: f64,
}

impl TransferSolution {
    pub fn sideband(&self, sign: SidebandSign, k: usize) -> Option<&DMatrix<C64>> {
        self.t_sideband
            .iter()
            .find(|b| b.sign == sign && b.k == k)
            .map(|b| &b.t)
    }

    /// Input frequency paired with sideband `(sign, k)`.
    pub fn sideband_frequency(&self, sign: SidebandSign, k: usize) -> f64 {
        sideband_frequency(self.probe_omega, self.omega_m, sign, k)
    }

    /// Central element `T_{out,in}`.
    pub fn element(
        &self,
        out: (&str, Quadrature),
        input: (&str, Quadrature),
    ) -> Result<C64> {
        let r = self.layout.column_index(out.0, out.1)?;
        let j = self.layout.column_index(input.0, input.1)?;
        Ok(self.t_central[(r, j)])
    }

    /// `max(1, ‖T‖_∞)`, the scale used for relative comparisons.
    pub fn scale(&self) -> f64 {
        linalg::norm_inf(&self.t_central).max(1.0)
    }
}

fn transfer(layout: &PortLayout, x: &DMatrix<C64>, subtract_identity: bool) -> DMatrix<C64> {
    let b = layout.b_complex();
    let mut t = b.transpose() * x * &b;
    if subtract_identity {
        for k in 0..t.nrows() {
            t[(k, k)] -= c(1.0, 0.0);
        }
    }
    t
}

/// `T(ω)` for a constant pump.
pub fn solve_constant(drift: &DriftMatrix, layout: &PortLayout, omega: f64) -> Result<TransferSolution> {
    let m = M6::identity() * c(0.0, -omega) - drift.a;
    let (x, condition) = linalg::lu_inverse(linalg::to_dynamic(&m), "constant-drive resolvent")?;
    Ok(TransferSolution {
        t_central: transfer(layout, &x, true),
        t_sideband: Vec::new(),
        x_central: linalg::to_fixed(&x),
        layout: layout.clone(),
        probe_omega: omega,
        omega_m: drift.omega_m,
        protocol: Protocol::Constant,
        condition,
    })
}

/// Central and sideband transfer matrices for the parametric pump via the
/// block recursion. Only `T_±[1]` and `T_±[2]` are materialised; higher
/// orders vanish identically.
pub fn solve_parametric(
    mats: &SidebandMatrixSet,
    layout: &PortLayout,
    omega: f64,
    n: usize,
) -> Result<TransferSolution> {
    let chain = build_recursion(mats, omega, n)?;
    solve_from_chain(mats, layout, &chain)
}

/// Same as [`solve_parametric`] with a prebuilt chain.
pub fn solve_from_chain(
    mats: &SidebandMatrixSet,
    layout: &PortLayout,
    chain: &RecursionChain,
) -> Result<TransferSolution> {
    let omega = chain.probe_omega;
    let a_d = BlockDiag::from_diagonal(&mats.diagonal());
    let central = BlockDiag::scalar(c(0.0, -omega))
        .sub(&a_d)
        .sub(chain.xi(SidebandSign::Minus, 1))
        .sub(chain.xi(SidebandSign::Plus, 1));
    let (x, cond) = central.inverse().map_err(|block| Error::Singular {
        context: format!("central resolvent block {block} (unstable or undamped mode at the probe frequency)"),
        condition: f64::INFINITY,
    })?;
    let condition = chain.condition.max(cond);
    if cond > linalg::WARN_CONDITION {
        log::warn!("central resolvent at ω = {omega:.6e}: condition {cond:.3e}");
    }
    let x = x.to_dense();
    let x_dyn = linalg::to_dynamic(&x);

    let mut t_sideband = Vec::new();
    for sign in SidebandSign::BOTH {
        let a = match sign {
            SidebandSign::Plus => mats.a_plus,
            SidebandSign::Minus => mats.a_minus,
        };
        let mut prod = x;
        for k in 1..=chain.n().min(2) {
            prod = prod * a * chain.x(sign, k).to_dense();
            t_sideband.push(SidebandBlock {
                sign,
                k,
                t: transfer(layout, &linalg::to_dynamic(&prod), false),
            });
        }
    }

    Ok(TransferSolution {
        t_central: transfer(layout, &x_dyn, true),
        t_sideband,
        x_central: x,
        layout: layout.clone(),
        probe_omega: omega,
        omega_m: mats.omega_m,
        protocol: Protocol::Parametric { n: chain.n() },
        condition,
    })
}

/// Assembles the `(2N+1)·6` extended matrix `−iW̄ − Ā` with block rows
/// ordered by sideband index `k = −N..=N`.
pub fn extended_matrix(mats: &SidebandMatrixSet, omega: f64, n: usize) -> DMatrix<C64> {
    let blocks = 2 * n + 1;
    let mut m = DMatrix::<C64>::zeros(6 * blocks, 6 * blocks);
    for j in 0..blocks {
        let k = j as f64 - n as f64;
        let nu = omega + 2.0 * k * mats.omega_m;
        let mut diag = m.view_mut((6 * j, 6 * j), (6, 6));
        diag.copy_from(&(M6::identity() * c(0.0, -nu) - mats.a_d));
        if j > 0 {
            m.view_mut((6 * j, 6 * (j - 1)), (6, 6)).copy_from(&(-mats.a_minus));
        }
        if j + 1 < blocks {
            m.view_mut((6 * j, 6 * (j + 1)), (6, 6)).copy_from(&(-mats.a_plus));
        }
    }
    m
}

/// Transfer matrices from a dense LU solve of the truncated extended
/// system. Returns `T_±[k]` for every k = 1..N.
pub fn dense_oracle(
    mats: &SidebandMatrixSet,
    layout: &PortLayout,
    omega: f64,
    n: usize,
) -> Result<TransferSolution> {
    check_order(n)?;
    let m = extended_matrix(mats, omega, n);
    let (inv, condition) = linalg::lu_inverse(m, "dense extended system")?;
    let block = |j: usize| inv.view((6 * n, 6 * j), (6, 6)).into_owned();
    let x = block(n);
    let mut t_sideband = Vec::new();
    for sign in SidebandSign::BOTH {
        for k in 1..=n {
            let j = match sign {
                SidebandSign::Plus => n + k,
                SidebandSign::Minus => n - k,
            };
            t_sideband.push(SidebandBlock {
                sign,
                k,
                t: transfer(layout, &block(j), false),
            });
        }
    }
    Ok(TransferSolution {
        t_central: transfer(layout, &x, true),
        t_sideband,
        x_central: linalg::to_fixed(&x),
        layout: layout.clone(),
        probe_omega: omega,
        omega_m: mats.omega_m,
        protocol: Protocol::Parametric { n },
        condition,
    })
}

/// Heuristic stability indicator: the largest real part among the
/// eigenvalues of the generator. Negative means every mode decays.
/// Advisory only; the solvers do not consult it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityAdvisory {
    pub max_real_part: f64,
    pub stable: bool,
}

fn advisory_from(m: DMatrix<C64>) -> Option<StabilityAdvisory> {
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)?;
    let (_, t) = schur.unpack();
    let max_real_part = (0..t.nrows()).map(|k| t[(k, k)].re).fold(f64::NEG_INFINITY, f64::max);
    Some(StabilityAdvisory {
        max_real_part,
        stable: max_real_part < 0.0,
    })
}

/// Advisory stability of the constant-drive drift matrix.
pub fn stability_constant(drift: &DriftMatrix) -> Option<StabilityAdvisory> {
    advisory_from(linalg::to_dynamic(&drift.a))
}

/// Advisory stability of the truncated extended generator `Ā + iW̄`.
pub fn stability_parametric(mats: &SidebandMatrixSet, n: usize) -> Option<StabilityAdvisory> {
    // −(−iW̄ − Ā) at ω = 0
    advisory_from(-extended_matrix(mats, 0.0, n))
}
