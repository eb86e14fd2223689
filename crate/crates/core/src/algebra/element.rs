use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::algebra::func::Func;
use crate::dynsys::{DynSystem, GroupElem};
use crate::error::AlgebraError;
use crate::pointset::PointSet;
use crate::scalar::RadScalar;

/// An element `Σ_g a_g u_g` of `C(X) ⋊ G`.
///
/// The covariance relation is `u_g f u_g* = f ∘ α_{g⁻¹}`, so
/// `(a·b)_k = Σ_g a_g · (b_{g⁻¹k} ∘ α_{g⁻¹})` and
/// `(a*)_g = conj(a_{g⁻¹}) ∘ α_{g⁻¹}`.
#[derive(Clone, Debug)]
pub struct CrossedElement {
    sys: Arc<DynSystem>,
    coeffs: Vec<Func>,
}

impl PartialEq for CrossedElement {
    fn eq(&self, other: &Self) -> bool {
        same_system(&self.sys, &other.sys) && self.coeffs == other.coeffs
    }
}

impl Eq for CrossedElement {}

pub(crate) fn same_system(a: &Arc<DynSystem>, b: &Arc<DynSystem>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl CrossedElement {
    pub fn zero(sys: &Arc<DynSystem>) -> Self {
        let m = sys.num_points();
        CrossedElement { sys: sys.clone(), coeffs: (0..sys.group().order()).map(|_| Func::zero(m)).collect() }
    }

    pub fn unit(sys: &Arc<DynSystem>) -> Self {
        CrossedElement::from_func(sys, Func::one(sys.num_points()))
    }

    /// The canonical unitary `u_g`.
    pub fn u(sys: &Arc<DynSystem>, g: GroupElem) -> Self {
        CrossedElement::monomial(sys, Func::one(sys.num_points()), g)
    }

    /// `f u_e`.
    pub fn from_func(sys: &Arc<DynSystem>, f: Func) -> Self {
        let e = sys.group().identity();
        CrossedElement::monomial(sys, f, e)
    }

    /// `χ_S u_e`.
    pub fn indicator(sys: &Arc<DynSystem>, set: &PointSet) -> Self {
        CrossedElement::from_func(sys, Func::indicator(set))
    }

    /// `f u_g`.
    pub fn monomial(sys: &Arc<DynSystem>, f: Func, g: GroupElem) -> Self {
        assert_eq!(f.len(), sys.num_points(), "function does not live on this system");
        let mut a = CrossedElement::zero(sys);
        a.coeffs[g] = f;
        a
    }

    pub fn from_coeffs(sys: &Arc<DynSystem>, coeffs: Vec<Func>) -> Result<Self, AlgebraError> {
        if coeffs.len() != sys.group().order() {
            return Err(AlgebraError::DimensionMismatch { expected: sys.group().order(), found: coeffs.len() });
        }
        if let Some(f) = coeffs.iter().find(|f| f.len() != sys.num_points()) {
            return Err(AlgebraError::DimensionMismatch { expected: sys.num_points(), found: f.len() });
        }
        Ok(CrossedElement { sys: sys.clone(), coeffs })
    }

    pub fn system(&self) -> &Arc<DynSystem> {
        &self.sys
    }

    /// The coefficient `a_g = E(a u_g*)`.
    pub fn coeff(&self, g: GroupElem) -> &Func {
        &self.coeffs[g]
    }

    pub fn coeffs(&self) -> &[Func] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Func::is_zero)
    }

    /// Membership in `C(X)`: every coefficient away from the identity vanishes exactly.
    pub fn in_diagonal(&self) -> bool {
        let e = self.sys.group().identity();
        self.coeffs.iter().enumerate().all(|(g, f)| g == e || f.is_zero())
    }

    /// The conditional expectation `E(a) = a_e`.
    pub fn cond_expectation(&self) -> Func {
        self.coeffs[self.sys.group().identity()].clone()
    }

    /// Every coefficient is Gaussian-rational valued.
    pub fn is_gaussian(&self) -> bool {
        self.coeffs.iter().all(Func::is_gaussian)
    }

    /// Group elements with a nonzero coefficient.
    pub fn support_elements(&self) -> impl Iterator<Item = GroupElem> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, f)| !f.is_zero()).map(|(g, _)| g)
    }

    fn check_same(&self, rhs: &CrossedElement) -> Result<(), AlgebraError> {
        if same_system(&self.sys, &rhs.sys) {
            Ok(())
        } else {
            Err(AlgebraError::SystemMismatch)
        }
    }

    pub fn try_add(&self, rhs: &CrossedElement) -> Result<Self, AlgebraError> {
        self.check_same(rhs)?;
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.try_add(b)).collect::<Result<_, _>>()?;
        Ok(CrossedElement { sys: self.sys.clone(), coeffs })
    }

    pub fn try_sub(&self, rhs: &CrossedElement) -> Result<Self, AlgebraError> {
        self.try_add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        CrossedElement { sys: self.sys.clone(), coeffs: self.coeffs.iter().map(Func::neg).collect() }
    }

    pub fn scale(&self, c: &RadScalar) -> Self {
        CrossedElement { sys: self.sys.clone(), coeffs: self.coeffs.iter().map(|f| f.scale(c)).collect() }
    }

    /// Left multiplication by a function: `f · a`.
    pub fn left_mul_func(&self, f: &Func) -> Self {
        CrossedElement { sys: self.sys.clone(), coeffs: self.coeffs.iter().map(|c| f.mul(c)).collect() }
    }

    /// Exact product.
    pub fn try_mul(&self, rhs: &CrossedElement) -> Result<Self, AlgebraError> {
        self.check_same(rhs)?;
        let group = self.sys.group();
        let mut out = CrossedElement::zero(&self.sys);
        for g in self.support_elements() {
            let g_inv = group.inv(g);
            for h in rhs.support_elements() {
                // a_g u_g b_h u_h = a_g (b_h ∘ α_{g⁻¹}) u_{gh}
                let term = self.coeffs[g].mul(&rhs.coeffs[h].compose_act(&self.sys, g_inv));
                let k = group.mul(g, h);
                out.coeffs[k] = out.coeffs[k].try_add(&term)?;
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let group = self.sys.group();
        let coeffs = group
            .elements()
            .map(|g| {
                let g_inv = group.inv(g);
                self.coeffs[g_inv].conj().compose_act(&self.sys, g_inv)
            })
            .collect();
        CrossedElement { sys: self.sys.clone(), coeffs }
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(&self, rhs: &CrossedElement) -> Result<Self, AlgebraError> {
        self.try_mul(rhs)?.try_sub(&rhs.try_mul(self)?)
    }
}

/// `a · b`.
pub fn multiply(a: &CrossedElement, b: &CrossedElement) -> Result<CrossedElement, AlgebraError> {
    a.try_mul(b)
}

/// `a*`.
pub fn adjoint(a: &CrossedElement) -> CrossedElement {
    a.adjoint()
}

/// `E(a)`.
pub fn cond_expectation(a: &CrossedElement) -> Func {
    a.cond_expectation()
}

/// An element of `M_n ⊗ (C(X) ⋊ G)`, entries row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixElement {
    n: usize,
    entries: Vec<CrossedElement>,
}

impl MatrixElement {
    pub fn zero(sys: &Arc<DynSystem>, n: usize) -> Self {
        MatrixElement { n, entries: (0..n * n).map(|_| CrossedElement::zero(sys)).collect() }
    }

    pub fn identity(sys: &Arc<DynSystem>, n: usize) -> Self {
        let mut m = MatrixElement::zero(sys, n);
        for i in 0..n {
            m.entries[i * n + i] = CrossedElement::unit(sys);
        }
        m
    }

    /// `diag(f_1, .., f_n)` with `f_i ∈ C(X)`.
    pub fn diag(sys: &Arc<DynSystem>, funcs: &[Func]) -> Self {
        let n = funcs.len();
        let mut m = MatrixElement::zero(sys, n);
        for (i, f) in funcs.iter().enumerate() {
            m.entries[i * n + i] = CrossedElement::from_func(sys, f.clone());
        }
        m
    }

    /// Builds from row-major entries; all entries must share one system.
    pub fn from_entries(n: usize, entries: Vec<CrossedElement>) -> Result<Self, AlgebraError> {
        if entries.len() != n * n {
            return Err(AlgebraError::DimensionMismatch { expected: n * n, found: entries.len() });
        }
        if let Some(first) = entries.first() {
            if entries.iter().any(|e| !same_system(e.system(), first.system())) {
                return Err(AlgebraError::SystemMismatch);
            }
        }
        Ok(MatrixElement { n, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &CrossedElement {
        &self.entries[i * self.n + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, value: CrossedElement) {
        self.entries[i * self.n + j] = value;
    }

    pub fn entries(&self) -> &[CrossedElement] {
        &self.entries
    }

    pub fn system(&self) -> Option<&Arc<DynSystem>> {
        self.entries.first().map(CrossedElement::system)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CrossedElement::is_zero)
    }

    pub fn is_gaussian(&self) -> bool {
        self.entries.iter().all(CrossedElement::is_gaussian)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.entry(j, i).adjoint());
            }
        }
        MatrixElement { n, entries }
    }

    pub fn try_add(&self, rhs: &MatrixElement) -> Result<Self, AlgebraError> {
        self.check_size(rhs)?;
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.try_add(b)).collect::<Result<_, _>>()?;
        Ok(MatrixElement { n: self.n, entries })
    }

    pub fn try_sub(&self, rhs: &MatrixElement) -> Result<Self, AlgebraError> {
        self.check_size(rhs)?;
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.try_sub(b)).collect::<Result<_, _>>()?;
        Ok(MatrixElement { n: self.n, entries })
    }

    pub fn try_mul(&self, rhs: &MatrixElement) -> Result<Self, AlgebraError> {
        self.check_size(rhs)?;
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = CrossedElement::zero(self.entry(i, j).system());
                for k in 0..n {
                    acc = acc.try_add(&self.entry(i, k).try_mul(rhs.entry(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Ok(MatrixElement { n, entries })
    }

    /// Membership in `D_n ⊗ C(X)`.
    pub fn in_diagonal(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| if i == j { self.entry(i, i).in_diagonal() } else { self.entry(i, j).is_zero() }))
    }

    /// Image in `C({0..n-1} × X) ⋊ (Z/n × G)` under the canonical
    /// identification: `Σ_g Σ_{i,j} (χ_{i} ⊗ x_{i,j,g}) u_{(i-j, g)}`.
    /// `product` must be `sys.product_with_cyclic(n)`.
    pub fn to_product_element(&self, product: &Arc<DynSystem>) -> Result<CrossedElement, AlgebraError> {
        let sys = self.system().ok_or(AlgebraError::DimensionMismatch { expected: 1, found: 0 })?;
        let n = self.n;
        let (gs, m) = (sys.group().order(), sys.num_points());
        if product.group().order() != n * gs || product.num_points() != n * m {
            return Err(AlgebraError::SystemMismatch);
        }
        let mut coeffs: Vec<Func> = (0..n * gs).map(|_| Func::zero(n * m)).collect();
        for i in 0..n {
            for j in 0..n {
                let c = (i + n - j) % n;
                for g in 0..gs {
                    let f = self.entry(i, j).coeff(g);
                    for x in 0..m {
                        if !f.value(x).is_zero() {
                            coeffs[c * gs + g].set_value(i * m + x, f.value(x).clone());
                        }
                    }
                }
            }
        }
        CrossedElement::from_coeffs(product, coeffs)
    }

    fn check_size(&self, rhs: &MatrixElement) -> Result<(), AlgebraError> {
        if self.n != rhs.n {
            return Err(AlgebraError::DimensionMismatch { expected: self.n, found: rhs.n });
        }
        match (self.system(), rhs.system()) {
            (Some(a), Some(b)) if !same_system(a, b) => Err(AlgebraError::SystemMismatch),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::FiniteGroup;

    fn z3() -> Arc<DynSystem> {
        Arc::new(DynSystem::translation(FiniteGroup::cyclic(3)))
    }

    fn chi(sys: &Arc<DynSystem>, pts: &[usize]) -> Func {
        Func::indicator(&PointSet::from_points(sys.num_points(), pts.iter().copied()))
    }

    #[test]
    fn group_law() {
        let sys = z3();
        let prod = CrossedElement::u(&sys, 1).try_mul(&CrossedElement::u(&sys, 2)).unwrap();
        assert_eq!(prod, CrossedElement::unit(&sys));
    }

    #[test]
    fn idempotent_indicator() {
        let sys = z3();
        let p = CrossedElement::from_func(&sys, chi(&sys, &[0]));
        assert_eq!(p.try_mul(&p).unwrap(), p);
    }

    #[test]
    fn covariance_moves_indicator_forward() {
        let sys = z3();
        let u = CrossedElement::u(&sys, 1);
        let p = CrossedElement::from_func(&sys, chi(&sys, &[0]));
        let conj = u.try_mul(&p).unwrap().try_mul(&u.adjoint()).unwrap();
        assert_eq!(conj, CrossedElement::from_func(&sys, chi(&sys, &[1])));
    }

    #[test]
    fn adjoint_examples() {
        let sys = z3();
        assert_eq!(CrossedElement::u(&sys, 1).adjoint(), CrossedElement::u(&sys, 2));
        let f = Func::from_values(alloc::vec![
            RadScalar::from_gauss(crate::scalar::GaussQ::i()),
            RadScalar::one(),
            RadScalar::zero()
        ]);
        assert_eq!(CrossedElement::from_func(&sys, f.clone()).adjoint(), CrossedElement::from_func(&sys, f.conj()));
        // (χ_0 u_1)* = u_2 χ_0 = (χ_0 ∘ α_1) u_2 = χ_2 u_2, and (χ_0 u_1)*(χ_0 u_1) = χ_2
        let a = CrossedElement::monomial(&sys, chi(&sys, &[0]), 1);
        assert_eq!(a.adjoint(), CrossedElement::monomial(&sys, chi(&sys, &[2]), 2));
        let aa = a.adjoint().try_mul(&a).unwrap();
        assert!(aa.in_diagonal());
        assert_eq!(aa.cond_expectation(), chi(&sys, &[2]));
    }

    #[test]
    fn expectation_examples() {
        let sys = z3();
        assert!(CrossedElement::u(&sys, 1).cond_expectation().is_zero());
        let f = chi(&sys, &[0, 2]);
        assert_eq!(CrossedElement::from_func(&sys, f.clone()).cond_expectation(), f);
    }

    #[test]
    fn system_mismatch() {
        let a = CrossedElement::unit(&z3());
        let b = CrossedElement::unit(&Arc::new(DynSystem::translation(FiniteGroup::cyclic(2))));
        assert_eq!(a.try_mul(&b), Err(AlgebraError::SystemMismatch));
    }

    #[test]
    fn product_identification_is_multiplicative() {
        let sys = Arc::new(DynSystem::translation(FiniteGroup::cyclic(2)));
        let prod = Arc::new(sys.product_with_cyclic(2));
        let mut x = MatrixElement::zero(&sys, 2);
        x.set_entry(0, 1, CrossedElement::monomial(&sys, chi(&sys, &[0]), 1));
        x.set_entry(1, 1, CrossedElement::from_func(&sys, chi(&sys, &[1])));
        let mut y = MatrixElement::zero(&sys, 2);
        y.set_entry(1, 0, CrossedElement::u(&sys, 1));
        y.set_entry(0, 0, CrossedElement::from_func(&sys, chi(&sys, &[0, 1])));
        let lhs = x.try_mul(&y).unwrap().to_product_element(&prod).unwrap();
        let rhs = x.to_product_element(&prod).unwrap().try_mul(&y.to_product_element(&prod).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(x.adjoint().to_product_element(&prod).unwrap(), x.to_product_element(&prod).unwrap().adjoint());
    }
}
