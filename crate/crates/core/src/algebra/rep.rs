//! The regular representation on `ℓ²(G × X)` and its orbit blocks.
//!
//! `π(f u_g) δ_(h,x) = f((gh)·x) δ_(gh,x)`. Each matrix entry of `π(a)` is a
//! single coefficient value, so the exact representation needs no sums.
//! Basis vector `(h, x)` has index `h·|X| + x`.

use alloc::vec::Vec;

use crate::algebra::element::{CrossedElement, MatrixElement};
use crate::dynsys::{DynSystem, Point};
use crate::error::AlgebraError;
use crate::linalg::{exact_rank, CMatrix, TOLERANCE};
use crate::scalar::{GaussQ, RadScalar};

/// Exact matrix of radical scalars.
pub type ExactMatrix = Vec<Vec<RadScalar>>;

/// `π(a)` with exact entries, size `|G|·|X|`.
pub fn regular_rep_exact(a: &CrossedElement) -> ExactMatrix {
    let sys = a.system();
    let (gs, m) = (sys.group().order(), sys.num_points());
    let mut out = alloc::vec![alloc::vec![RadScalar::zero(); gs * m]; gs * m];
    for h in 0..gs {
        for x in 0..m {
            for g in a.support_elements() {
                let k = sys.group().mul(g, h);
                out[k * m + x][h * m + x] = a.coeff(g).value(sys.act(k, x)).clone();
            }
        }
    }
    out
}

/// `π(a)` in floating point.
pub fn regular_rep(a: &CrossedElement) -> CMatrix {
    to_cmatrix(&regular_rep_exact(a))
}

pub fn to_cmatrix(m: &ExactMatrix) -> CMatrix {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = CMatrix::zeros(rows, cols);
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                out[(i, j)] = v.to_c64();
            }
        }
    }
    out
}

/// The `|G|×|G|` block of `π(a)` on `ℓ²(G × {x₀})`: entry `(k, h)` is
/// `a_{kh⁻¹}(k·x₀)`.
pub fn block_at_exact(a: &CrossedElement, x0: Point) -> ExactMatrix {
    let sys = a.system();
    let group = sys.group();
    let gs = group.order();
    let mut out = alloc::vec![alloc::vec![RadScalar::zero(); gs]; gs];
    for k in 0..gs {
        for h in 0..gs {
            let g = group.mul(k, group.inv(h));
            out[k][h] = a.coeff(g).value(sys.act(k, x0)).clone();
        }
    }
    out
}

/// Least point of each orbit.
pub fn orbit_representatives(sys: &DynSystem) -> Vec<Point> {
    sys.orbits().iter().map(|o| o.iter().next().expect("orbits are nonempty")).collect()
}

/// One exact `|G|×|G|` block per orbit, at the orbit's least point. For a
/// free action each block is the image of `a` under `C(orbit) ⋊ G ≅ M_|G|`.
pub fn orbit_block_decomposition(a: &CrossedElement) -> Result<Vec<ExactMatrix>, AlgebraError> {
    if !a.system().is_free() {
        return Err(AlgebraError::NotFree);
    }
    Ok(orbit_representatives(a.system()).into_iter().map(|x0| block_at_exact(a, x0)).collect())
}

/// Float blocks at every orbit representative. `π` is unitarily equivalent
/// to a direct sum of these (with multiplicities), free or not.
pub fn float_blocks(a: &CrossedElement) -> Vec<CMatrix> {
    orbit_representatives(a.system()).into_iter().map(|x0| to_cmatrix(&block_at_exact(a, x0))).collect()
}

/// How a norm was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMode {
    /// Exact answer where one is available (zero elements), float otherwise.
    ExactFirst,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormReport {
    pub value: f64,
    pub tolerance: f64,
    pub exact: bool,
}

/// Operator norm `‖π(a)‖`, absolute tolerance 1e-9.
pub fn operator_norm(a: &CrossedElement, mode: NormMode) -> NormReport {
    if a.is_zero() {
        return NormReport { value: 0.0, tolerance: 0.0, exact: mode == NormMode::ExactFirst };
    }
    let value = float_blocks(a).iter().map(CMatrix::spectral_norm).fold(0.0, f64::max);
    NormReport { value, tolerance: TOLERANCE, exact: false }
}

/// Norm of a matrix element, computed through the identification
/// `M_n ⊗ (C(X) ⋊ G) ≅ C({0..n-1} × X) ⋊ (Z/n × G)`.
pub fn matrix_operator_norm(x: &MatrixElement) -> Result<f64, AlgebraError> {
    let Some(sys) = x.system() else { return Ok(0.0) };
    let product = alloc::sync::Arc::new(sys.product_with_cyclic(x.size()));
    Ok(operator_norm(&x.to_product_element(&product)?, NormMode::Float).value)
}

/// Smallest eigenvalue of `π(a)` over all orbit blocks; `None` if `π(a)` is
/// not Hermitian within tolerance.
pub fn min_eigenvalue(a: &CrossedElement) -> Option<f64> {
    let mut min = f64::INFINITY;
    for b in float_blocks(a) {
        if !b.is_hermitian(TOLERANCE) {
            return None;
        }
        min = min.min(b.hermitian_eigenvalues().first().copied().unwrap_or(0.0));
    }
    Some(min)
}

/// Positive in the representation (Hermitian, eigenvalues ≥ -1e-9).
pub fn is_positive_element(a: &CrossedElement) -> bool {
    min_eigenvalue(a).is_some_and(|m| m >= -TOLERANCE)
}

/// Rank of a block: exact over the Gaussian rationals when possible.
pub fn block_rank(block: &ExactMatrix) -> usize {
    if block.iter().flatten().all(RadScalar::is_gaussian) {
        let m: Vec<Vec<GaussQ>> = block.iter().map(|row| row.iter().map(|v| v.coeff().clone()).collect()).collect();
        exact_rank(m)
    } else {
        let c = to_cmatrix(block);
        if c.is_hermitian(TOLERANCE) {
            c.hermitian_eigenvalues().iter().filter(|&&e| e.abs() > TOLERANCE).count()
        } else {
            c.rank(TOLERANCE)
        }
    }
}
