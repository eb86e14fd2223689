//! Normalizers, r-normalizers and s-normalizers of `C(X)` inside
//! `C(X) ⋊ G`, and of `D_n ⊗ C(X)` inside the matrix amplification.
//!
//! Algebraic predicates test `a* χ_x a ∈ C(X)` over the point-indicator
//! basis, which suffices by linearity. Support predicates use the
//! coefficient-support characterization, valid for free actions.
//!
//! Predicates return `Result` because the products involved may try to add
//! unlike radicals.

use alloc::vec::Vec;

use crate::algebra::{CrossedElement, Func, MatrixElement};
use crate::castles::OrderZeroMap;
use crate::error::{AlgebraError, NormalizerError};
use crate::pointset::PointSet;

/// `a* χ_x a ∈ C(X)` for every point `x`.
pub fn is_r_normalizer(a: &CrossedElement) -> Result<bool, AlgebraError> {
    let sys = a.system();
    for x in 0..sys.num_points() {
        let chi_a = a.left_mul_func(&Func::point_indicator(sys.num_points(), x));
        if !a.adjoint().try_mul(&chi_a)?.in_diagonal() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `a χ_x a* ∈ C(X)` for every point `x`.
pub fn is_s_normalizer(a: &CrossedElement) -> Result<bool, AlgebraError> {
    is_r_normalizer(&a.adjoint())
}

pub fn is_normalizer(a: &CrossedElement) -> Result<bool, AlgebraError> {
    Ok(is_r_normalizer(a)? && is_s_normalizer(a)?)
}

/// Open supports of the coefficients are pairwise disjoint. Agrees with
/// [`is_r_normalizer`] on free systems.
pub fn is_r_normalizer_by_support(a: &CrossedElement) -> Result<bool, NormalizerError> {
    if !a.system().is_free() {
        return Err(NormalizerError::NotFree);
    }
    Ok(pairwise_disjoint(a.coeffs().iter().map(Func::open_support)))
}

fn pairwise_disjoint<I: IntoIterator<Item = PointSet>>(sets: I) -> bool {
    let mut seen: Option<PointSet> = None;
    for s in sets {
        match &mut seen {
            None => seen = Some(s),
            Some(acc) => {
                if !acc.is_disjoint(&s) {
                    return false;
                }
                *acc = acc.union(&s);
            }
        }
    }
    true
}

/// Entrywise criterion: every `x_ij` is an r-normalizer and
/// `x_ki* χ_p x_kj = 0` for all `i ≠ j`, all `k` and every point `p`.
pub fn matrix_is_r_normalizer(x: &MatrixElement) -> Result<bool, AlgebraError> {
    let n = x.size();
    for e in x.entries() {
        if !is_r_normalizer(e)? {
            return Ok(false);
        }
    }
    let Some(sys) = x.system() else { return Ok(true) };
    let m = sys.num_points();
    for k in 0..n {
        for i in 0..n {
            let left = x.entry(k, i).adjoint();
            for j in (0..n).filter(|&j| j != i) {
                for p in 0..m {
                    let right = x.entry(k, j).left_mul_func(&Func::point_indicator(m, p));
                    if !left.try_mul(&right)?.is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Support criterion: for each row `i` the supports of `x_{i,j,g}` over all
/// `(j, g)` are pairwise disjoint. Free systems only.
pub fn matrix_is_r_normalizer_by_support(x: &MatrixElement) -> Result<bool, NormalizerError> {
    let Some(sys) = x.system() else { return Ok(true) };
    if !sys.is_free() {
        return Err(NormalizerError::NotFree);
    }
    let n = x.size();
    Ok((0..n).all(|i| {
        pairwise_disjoint((0..n).flat_map(|j| x.entry(i, j).coeffs().iter().map(Func::open_support)))
    }))
}

/// Reduction through `C({0..n-1} × X) ⋊ (Z/n × G)`: the algebraic predicate
/// applied to the image of `x`.
pub fn matrix_is_r_normalizer_via_product(x: &MatrixElement) -> Result<bool, AlgebraError> {
    let Some(sys) = x.system() else { return Ok(true) };
    let product = alloc::sync::Arc::new(sys.product_with_cyclic(x.size()));
    is_r_normalizer(&x.to_product_element(&product)?)
}

/// Which orthogonality hypotheses to impose on a sum of normalizers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Orthogonality {
    /// `x_i* x_j = 0` for `i ≠ j`; gives `z* D z ⊆ D`.
    pub left: bool,
    /// `x_i x_j* = 0` for `i ≠ j`; gives `z D z* ⊆ D`.
    pub right: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedSum {
    pub sum: CrossedElement,
    /// `z* D z ⊆ D`, certified and re-verified.
    pub r_normalizer: bool,
    /// `z D z* ⊆ D`, certified and re-verified.
    pub s_normalizer: bool,
}

impl CertifiedSum {
    pub fn is_normalizer(&self) -> bool {
        self.r_normalizer && self.s_normalizer
    }
}

/// `Σ x_i` for normalizers `x_i` satisfying the requested hypotheses.
pub fn orthogonal_sum(xs: &[CrossedElement], hyp: Orthogonality) -> Result<CertifiedSum, NormalizerError> {
    let first = xs.first().ok_or(AlgebraError::DimensionMismatch { expected: 1, found: 0 })?;
    for (index, x) in xs.iter().enumerate() {
        if !is_normalizer(x)? {
            return Err(NormalizerError::NotNormalizer { index });
        }
    }
    for i in 0..xs.len() {
        for j in (0..xs.len()).filter(|&j| j != i) {
            if hyp.left && !xs[i].adjoint().try_mul(&xs[j])?.is_zero() {
                return Err(NormalizerError::HypothesisViolated { i, j, hypothesis: "x_i* x_j = 0" });
            }
            if hyp.right && !xs[i].try_mul(&xs[j].adjoint())?.is_zero() {
                return Err(NormalizerError::HypothesisViolated { i, j, hypothesis: "x_i x_j* = 0" });
            }
        }
    }
    let mut sum = first.clone();
    for x in &xs[1..] {
        sum = sum.try_add(x)?;
    }
    let r_normalizer = hyp.left || xs.len() == 1;
    let s_normalizer = hyp.right || xs.len() == 1;
    // the conclusion is re-checked, never trusted
    if r_normalizer {
        assert!(is_r_normalizer(&sum)?, "orthogonal sum failed the r-normalizer check");
    }
    if s_normalizer {
        assert!(is_s_normalizer(&sum)?, "orthogonal sum failed the s-normalizer check");
    }
    Ok(CertifiedSum { sum, r_normalizer, s_normalizer })
}

/// For a normalizer `a`, both `a*a` and `aa*` lie in `C(X)`. Returns the
/// membership result; panics if `a` is a normalizer and membership fails.
pub fn check_square_in_subalgebra(a: &CrossedElement) -> Result<bool, AlgebraError> {
    let inside = a.adjoint().try_mul(a)?.in_diagonal() && a.try_mul(&a.adjoint())?.in_diagonal();
    if is_normalizer(a)? {
        assert!(inside, "normalizer with a*a or aa* outside C(X)");
    }
    Ok(inside)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PreservingReport {
    /// Every `φ(e_ij)` is a normalizer.
    pub preserving: bool,
    /// Every `φ(e_ii)` lies in `C(X)`; always true when `preserving` is.
    pub diagonal_in_subalgebra: bool,
}

/// Matrix-unit test for `φ(N(D_n)) ⊆ N(C(X))`.
pub fn check_normalizer_preserving(phi: &OrderZeroMap) -> Result<PreservingReport, AlgebraError> {
    let n = phi.size();
    let mut preserving = true;
    for i in 0..n {
        for j in 0..n {
            if !is_normalizer(phi.image(i, j))? {
                preserving = false;
            }
        }
    }
    let diagonal_in_subalgebra = (0..n).all(|i| phi.image(i, i).in_diagonal());
    if preserving {
        assert!(diagonal_in_subalgebra, "normalizer-preserving map moved a diagonal matrix out of C(X)");
    }
    Ok(PreservingReport { preserving, diagonal_in_subalgebra })
}

/// Indices `(i, j)` with `φ(e_ij)` not a normalizer.
pub fn non_normalizer_units(phi: &OrderZeroMap) -> Result<Vec<(usize, usize)>, AlgebraError> {
    let n = phi.size();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if !is_normalizer(phi.image(i, j))? {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}
