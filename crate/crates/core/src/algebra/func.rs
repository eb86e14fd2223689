use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::dynsys::{DynSystem, GroupElem};
use crate::error::AlgebraError;
use crate::pointset::PointSet;
use crate::scalar::{RadScalar, Rational};

/// An element of `C(X)`: one exact scalar per point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Func {
    values: Vec<RadScalar>,
}

impl Func {
    pub fn zero(num_points: usize) -> Self {
        Func { values: vec![RadScalar::zero(); num_points] }
    }

    pub fn constant(num_points: usize, c: RadScalar) -> Self {
        Func { values: vec![c; num_points] }
    }

    pub fn one(num_points: usize) -> Self {
        Func::constant(num_points, RadScalar::one())
    }

    /// The indicator function of `set`.
    pub fn indicator(set: &PointSet) -> Self {
        let values = (0..set.universe()).map(|x| if set.contains(x) { RadScalar::one() } else { RadScalar::zero() }).collect();
        Func { values }
    }

    pub fn point_indicator(num_points: usize, x: usize) -> Self {
        Func::indicator(&PointSet::from_points(num_points, [x]))
    }

    pub fn from_values(values: Vec<RadScalar>) -> Self {
        Func { values }
    }

    pub fn from_rationals<I: IntoIterator<Item = Rational>>(values: I) -> Self {
        Func { values: values.into_iter().map(RadScalar::from_rational).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, x: usize) -> &RadScalar {
        &self.values[x]
    }

    pub fn values(&self) -> &[RadScalar] {
        &self.values
    }

    pub fn set_value(&mut self, x: usize, v: RadScalar) {
        self.values[x] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(RadScalar::is_zero)
    }

    /// Every value is a nonnegative real.
    pub fn is_positive(&self) -> bool {
        self.values.iter().all(RadScalar::is_nonneg_real)
    }

    /// Every value is a Gaussian rational.
    pub fn is_gaussian(&self) -> bool {
        self.values.iter().all(RadScalar::is_gaussian)
    }

    /// `supp°(f)`: the points where `f` is nonzero.
    pub fn open_support(&self) -> PointSet {
        PointSet::from_points(self.len(), (0..self.len()).filter(|&x| !self.values[x].is_zero()))
    }

    pub fn try_add(&self, rhs: &Func) -> Result<Func, AlgebraError> {
        self.check_len(rhs)?;
        let values = self.values.iter().zip(&rhs.values).map(|(a, b)| a.try_add(b)).collect::<Result<_, _>>()?;
        Ok(Func { values })
    }

    pub fn try_sub(&self, rhs: &Func) -> Result<Func, AlgebraError> {
        self.try_add(&rhs.neg())
    }

    pub fn neg(&self) -> Func {
        Func { values: self.values.iter().map(|v| -v).collect() }
    }

    /// Pointwise product.
    pub fn mul(&self, rhs: &Func) -> Func {
        assert_eq!(self.len(), rhs.len(), "functions over different point sets");
        Func { values: self.values.iter().zip(&rhs.values).map(|(a, b)| a * b).collect() }
    }

    pub fn scale(&self, c: &RadScalar) -> Func {
        Func { values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn conj(&self) -> Func {
        Func { values: self.values.iter().map(RadScalar::conj).collect() }
    }

    /// Restriction to `set` (zero elsewhere).
    pub fn restrict(&self, set: &PointSet) -> Func {
        Func { values: (0..self.len()).map(|x| if set.contains(x) { self.values[x].clone() } else { RadScalar::zero() }).collect() }
    }

    /// `f ∘ α_g`, i.e. `x ↦ f(g·x)`.
    pub fn compose_act(&self, sys: &DynSystem, g: GroupElem) -> Func {
        Func { values: (0..self.len()).map(|x| self.values[sys.act(g, x)].clone()).collect() }
    }

    /// Pointwise `max(f - ε, 0)` for a positive function.
    pub fn pos_cutdown(&self, eps: &Rational) -> Result<Func, AlgebraError> {
        let eps_scalar = RadScalar::from_rational(eps.clone());
        let mut values = Vec::with_capacity(self.len());
        for (point, v) in self.values.iter().enumerate() {
            match v.cmp_rational(eps) {
                None => return Err(AlgebraError::NotPositive { point }),
                Some(Ordering::Greater) => values.push(v.try_sub(&eps_scalar)?),
                Some(_) => values.push(RadScalar::zero()),
            }
        }
        Ok(Func { values })
    }

    /// Pointwise exact square root of a positive rational-valued function.
    pub fn sqrt(&self) -> Result<Func, AlgebraError> {
        let mut values = Vec::with_capacity(self.len());
        for (point, v) in self.values.iter().enumerate() {
            match v.as_rational() {
                Some(q) => values.push(RadScalar::sqrt_of(q).map_err(|_| AlgebraError::NotPositive { point })?),
                None if v.is_zero() => values.push(RadScalar::zero()),
                None => return Err(AlgebraError::NotPositive { point }),
            }
        }
        Ok(Func { values })
    }

    /// Largest `|f(x)|` in floating point.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.to_c64().norm()).fold(0.0, f64::max)
    }

    fn check_len(&self, rhs: &Func) -> Result<(), AlgebraError> {
        if self.len() == rhs.len() {
            Ok(())
        } else {
            Err(AlgebraError::DimensionMismatch { expected: self.len(), found: rhs.len() })
        }
    }
}

/// `supp°(f)`.
pub fn open_support(f: &Func) -> PointSet {
    f.open_support()
}

/// `(f - ε)_+` computed pointwise.
pub fn pos_cutdown(f: &Func, eps: &Rational) -> Result<Func, AlgebraError> {
    f.pos_cutdown(eps)
}
