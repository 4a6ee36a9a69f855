//! Small linear-algebra helpers: the 2×2 block-diagonal algebra used by the
//! sideband recursion and a dense LU inverse that reports its conditioning.

use nalgebra::{DMatrix, Matrix2, Matrix6};

use crate::{Error, Result, C64};

pub type M2 = Matrix2<C64>;
pub type M6 = Matrix6<C64>;

/// Condition numbers above this are reported through `log::warn!`.
pub const WARN_CONDITION: f64 = 1e12;

/// Condition numbers above this are treated as numerically singular.
pub const SINGULAR_CONDITION: f64 = 1.0 / f64::EPSILON;

/// State-index ranges of the three 2×2 blocks: `{a_o, a_e}`,
/// `{a_o†, a_e†}`, `{a_m, a_m†}`.
pub const BLOCK_RANGES: [(usize, usize); 3] = [(0, 2), (2, 4), (4, 6)];

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Induced 1-norm (max column sum) of a dense complex matrix.
pub fn norm_1(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Induced ∞-norm (max row sum) of a dense complex matrix.
pub fn norm_inf(m: &DMatrix<C64>) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entry modulus.
pub fn max_abs<'a>(entries: impl IntoIterator<Item = &'a C64>) -> f64 {
    entries.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn norm_1_m2(m: &M2) -> f64 {
    (m[(0, 0)].norm() + m[(1, 0)].norm()).max(m[(0, 1)].norm() + m[(1, 1)].norm())
}

/// Closed-form inverse of a 2×2 block with its 1-norm condition number.
/// `None` if the block is singular to working precision.
pub fn inv2(m: &M2) -> Option<(M2, f64)> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det.norm() == 0.0 || !det.is_finite() {
        return None;
    }
    let inv = M2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det;
    let cond = norm_1_m2(m) * norm_1_m2(&inv);
    if !(cond.is_finite() && cond < SINGULAR_CONDITION) {
        return None;
    }
    Some((inv, cond))
}

/// A 6×6 matrix that is block diagonal in the three 2×2 blocks of
/// [`BLOCK_RANGES`]. Off-block entries are zero by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDiag {
    pub blocks: [M2; 3],
}

impl BlockDiag {
    pub fn zero() -> Self {
        Self {
            blocks: [M2::zeros(); 3],
        }
    }

    /// Block-diagonal view of a diagonal matrix given by its diagonal.
    pub fn from_diagonal(d: &[C64; 6]) -> Self {
        let z = C64::new(0.0, 0.0);
        Self {
            blocks: [
                M2::new(d[0], z, z, d[1]),
                M2::new(d[2], z, z, d[3]),
                M2::new(d[4], z, z, d[5]),
            ],
        }
    }

    /// `s·I` in every block.
    pub fn scalar(s: C64) -> Self {
        Self {
            blocks: [M2::identity() * s; 3],
        }
    }

    pub fn to_dense(&self) -> M6 {
        let mut out = M6::zeros();
        for (b, &(lo, _)) in self.blocks.iter().zip(&BLOCK_RANGES) {
            out.fixed_view_mut::<2, 2>(lo, lo).copy_from(b);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            blocks: std::array::from_fn(|i| self.blocks[i] - other.blocks[i]),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            blocks: std::array::from_fn(|i| self.blocks[i] + other.blocks[i]),
        }
    }

    /// Blockwise inverse. On failure returns the index (0-based) of the
    /// first singular block. On success also returns the largest block
    /// condition number, which equals the 1-norm condition of the whole
    /// matrix up to a factor bounded by the block count.
    pub fn inverse(&self) -> std::result::Result<(Self, f64), usize> {
        let mut blocks = [M2::zeros(); 3];
        let mut cond: f64 = 1.0;
        for (i, b) in self.blocks.iter().enumerate() {
            let (inv, c) = inv2(b).ok_or(i)?;
            blocks[i] = inv;
            cond = cond.max(c);
        }
        Ok((Self { blocks }, cond))
    }

    pub fn norm_inf(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                (b[(0, 0)].norm() + b[(0, 1)].norm()).max(b[(1, 0)].norm() + b[(1, 1)].norm())
            })
            .fold(0.0, f64::max)
    }
}

/// Largest modulus among the entries of `m` outside the three 2×2 blocks.
pub fn off_block_max(m: &M6) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..6 {
        for col in 0..6 {
            if r / 2 != col / 2 {
                worst = worst.max(m[(r, col)].norm());
            }
        }
    }
    worst
}

/// ∞-norm of a fixed 6×6 matrix.
pub fn norm_inf6(m: &M6) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Dense inverse by LU with partial pivoting, returned together with the
/// 1-norm condition number `‖M‖₁‖M⁻¹‖₁`.
///
/// Matrices whose condition exceeds `1/ε` are rejected as singular; above
/// [`WARN_CONDITION`] a warning is logged.
pub fn lu_inverse(m: DMatrix<C64>, context: &str) -> Result<(DMatrix<C64>, f64)> {
    let n1 = norm_1(&m);
    let inv = m.lu().try_inverse().ok_or_else(|| Error::Singular {
        context: context.to_string(),
        condition: f64::INFINITY,
    })?;
    let cond = n1 * norm_1(&inv);
    if !(cond.is_finite() && cond < SINGULAR_CONDITION) {
        return Err(Error::Singular {
            context: context.to_string(),
            condition: cond,
        });
    }
    if cond > WARN_CONDITION {
        log::warn!("{context}: condition estimate {cond:.3e} exceeds {WARN_CONDITION:.0e}");
    }
    Ok((inv, cond))
}

/// Copies a fixed 6×6 matrix into a dynamically sized one.
pub fn to_dynamic(m: &M6) -> DMatrix<C64> {
    DMatrix::from_iterator(6, 6, m.iter().copied())
}

/// Copies a dynamically sized 6×6 matrix into a fixed one.
pub fn to_fixed(m: &DMatrix<C64>) -> M6 {
    assert_eq!(m.shape(), (6, 6));
    M6::from_iterator(m.iter().copied())
}
