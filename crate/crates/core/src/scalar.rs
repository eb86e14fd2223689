//! Exact scalars.
//!
//! [`GaussQ`] is a Gaussian rational `re + im·i`. [`RadScalar`] is a Gaussian
//! rational times the square root of a square-free positive integer, which is
//! the shape of every value the witness compiler and castle decomposition
//! produce. Sums are only defined between like radicals (or with zero).

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraError;

/// Exact rational number.
pub type Rational = BigRational;

/// Builds the rational `num/den`.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integer rational.
pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// A Gaussian rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussQ {
    pub re: Rational,
    pub im: Rational,
}

impl GaussQ {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussQ { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussQ { re, im: Rational::zero() }
    }

    pub fn zero() -> Self {
        GaussQ::default()
    }

    pub fn one() -> Self {
        GaussQ::real(Rational::one())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussQ::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussQ::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, always rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, q: &Rational) -> Self {
        GaussQ::new(&self.re * q, &self.im * q)
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussQ::new(&self.re / &n, -&self.im / &n))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl From<Rational> for GaussQ {
    fn from(q: Rational) -> Self {
        GaussQ::real(q)
    }
}

impl Add for &GaussQ {
    type Output = GaussQ;
    fn add(self, rhs: &GaussQ) -> GaussQ {
        GaussQ::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussQ {
    type Output = GaussQ;
    fn sub(self, rhs: &GaussQ) -> GaussQ {
        GaussQ::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussQ {
    type Output = GaussQ;
    fn mul(self, rhs: &GaussQ) -> GaussQ {
        GaussQ::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        GaussQ::new(-self.re.clone(), -self.im.clone())
    }
}

/// Splits `n = s² · r` with `r` square-free. Trial division; inputs here are
/// products of small numerators and denominators.
fn square_free_split(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    if let Some(small) = n.to_u64() {
        let (s, r) = square_free_split_u64(small);
        return (BigUint::from(s), BigUint::from(r));
    }
    let mut rest = n.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    let mut d = BigUint::from(2u32);
    while &d * &d <= rest {
        let mut count = 0u32;
        while (&rest % &d).is_zero() {
            rest /= &d;
            count += 1;
        }
        for _ in 0..count / 2 {
            square *= &d;
        }
        if count % 2 == 1 {
            free *= &d;
        }
        d += 1u32;
    }
    free *= rest;
    (square, free)
}

fn square_free_split_u64(mut n: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut free = 1u64;
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        let mut count = 0u32;
        while n.is_multiple_of(d) {
            n /= d;
            count += 1;
        }
        for _ in 0..count / 2 {
            square *= d;
        }
        if count % 2 == 1 {
            free *= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    (square, free * n)
}

/// `coeff · √radicand` in canonical form: the radicand is a square-free
/// positive integer and zero is always `0 · √1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RadScalar {
    coeff: GaussQ,
    radicand: BigUint,
}

impl Default for RadScalar {
    fn default() -> Self {
        RadScalar::zero()
    }
}

impl RadScalar {
    pub fn zero() -> Self {
        RadScalar { coeff: GaussQ::zero(), radicand: BigUint::one() }
    }

    pub fn one() -> Self {
        RadScalar::from_gauss(GaussQ::one())
    }

    pub fn from_gauss(coeff: GaussQ) -> Self {
        RadScalar { coeff, radicand: BigUint::one() }
    }

    pub fn from_rational(q: Rational) -> Self {
        RadScalar::from_gauss(GaussQ::real(q))
    }

    /// `coeff · √radicand` for an arbitrary positive rational radicand,
    /// canonicalized. A zero radicand or zero coefficient gives zero.
    pub fn new(coeff: GaussQ, radicand: &Rational) -> Result<Self, AlgebraError> {
        if radicand.is_negative() {
            return Err(AlgebraError::NegativeRadicand);
        }
        let root = RadScalar::sqrt_of(radicand)?;
        Ok(root.mul_gauss(&coeff))
    }

    /// Exact square root of a nonnegative rational.
    pub fn sqrt_of(q: &Rational) -> Result<Self, AlgebraError> {
        if q.is_negative() {
            return Err(AlgebraError::NegativeRadicand);
        }
        if q.is_zero() {
            return Ok(RadScalar::zero());
        }
        // sqrt(p/d) = sqrt(p·d) / d
        let p = q.numer().magnitude();
        let d = q.denom().magnitude();
        let (square, free) = square_free_split(&(p * d));
        let c = BigRational::new(BigInt::from(square), BigInt::from(d.clone()));
        Ok(RadScalar { coeff: GaussQ::real(c), radicand: free })
    }

    /// `1 / sqrt(q)` for a positive rational `q`.
    pub fn inv_sqrt_of(q: &Rational) -> Result<Self, AlgebraError> {
        if !q.is_positive() {
            return Err(AlgebraError::NegativeRadicand);
        }
        RadScalar::sqrt_of(&q.recip())
    }

    pub fn coeff(&self) -> &GaussQ {
        &self.coeff
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.radicand.is_one() && self.coeff == GaussQ::one()
    }

    /// True when the value is a Gaussian rational (radicand 1).
    pub fn is_gaussian(&self) -> bool {
        self.radicand.is_one()
    }

    /// The value as a plain rational, when it is one.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.radicand.is_one() && self.coeff.is_real()).then_some(&self.coeff.re)
    }

    pub fn is_real(&self) -> bool {
        self.coeff.is_real()
    }

    /// Real and `>= 0`.
    pub fn is_nonneg_real(&self) -> bool {
        self.coeff.is_real() && !self.coeff.re.is_negative()
    }

    /// `|z|²`, always rational.
    pub fn norm_sqr(&self) -> Rational {
        self.coeff.norm_sqr() * BigRational::from_integer(BigInt::from(self.radicand.clone()))
    }

    /// `|z|` as a radical scalar.
    pub fn abs(&self) -> RadScalar {
        RadScalar::sqrt_of(&self.norm_sqr()).expect("norm is nonnegative")
    }

    pub fn conj(&self) -> Self {
        RadScalar { coeff: self.coeff.conj(), radicand: self.radicand.clone() }
    }

    pub fn mul_gauss(&self, g: &GaussQ) -> Self {
        RadScalar::canonical(&self.coeff * g, self.radicand.clone())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        RadScalar::canonical(self.coeff.scale(q), self.radicand.clone())
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // 1/(c√r) = conj(c)√r / (|c|² r)
        let denom = self.norm_sqr();
        Some(RadScalar {
            coeff: self.coeff.conj().scale(&denom.recip()),
            radicand: self.radicand.clone(),
        })
    }

    pub fn div(&self, rhs: &RadScalar) -> Option<Self> {
        rhs.inv().map(|r| self * &r)
    }

    /// Exact sum. Radicands must agree unless one side is zero.
    pub fn try_add(&self, rhs: &RadScalar) -> Result<Self, AlgebraError> {
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(rhs.clone());
        }
        if self.radicand != rhs.radicand {
            return Err(AlgebraError::RadicalAdditionMismatch {
                left: self.radicand.clone(),
                right: rhs.radicand.clone(),
            });
        }
        Ok(RadScalar::canonical(&self.coeff + &rhs.coeff, self.radicand.clone()))
    }

    pub fn try_sub(&self, rhs: &RadScalar) -> Result<Self, AlgebraError> {
        self.try_add(&-rhs)
    }

    /// Compares a nonnegative real radical with a nonnegative rational.
    pub fn cmp_rational(&self, q: &Rational) -> Option<Ordering> {
        if !self.is_nonneg_real() || q.is_negative() {
            return None;
        }
        if self.radicand.is_one() {
            return Some(self.coeff.re.cmp(q));
        }
        Some(self.norm_sqr().cmp(&(q * q)))
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        let root = libm::sqrt(self.radicand.to_f64().unwrap_or(f64::NAN));
        let (re, im) = self.coeff.to_f64_pair();
        num_complex::Complex64::new(re * root, im * root)
    }

    fn canonical(coeff: GaussQ, radicand: BigUint) -> Self {
        if coeff.is_zero() {
            RadScalar::zero()
        } else {
            RadScalar { coeff, radicand }
        }
    }
}

impl From<Rational> for RadScalar {
    fn from(q: Rational) -> Self {
        RadScalar::from_rational(q)
    }
}

impl From<GaussQ> for RadScalar {
    fn from(g: GaussQ) -> Self {
        RadScalar::from_gauss(g)
    }
}

impl Mul for &RadScalar {
    type Output = RadScalar;
    fn mul(self, rhs: &RadScalar) -> RadScalar {
        if self.is_zero() || rhs.is_zero() {
            return RadScalar::zero();
        }
        // √r·√s with r, s square-free: g = gcd(r, s), r·s = g²·(r/g)(s/g)
        let g = self.radicand.gcd(&rhs.radicand);
        let radicand = (&self.radicand / &g) * (&rhs.radicand / &g);
        let factor = BigRational::from_integer(BigInt::from(g));
        RadScalar::canonical((&self.coeff * &rhs.coeff).scale(&factor), radicand)
    }
}

impl Neg for &RadScalar {
    type Output = RadScalar;
    fn neg(self) -> RadScalar {
        RadScalar { coeff: -&self.coeff, radicand: self.radicand.clone() }
    }
}

fn fmt_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => fmt_rational(&self.re, f),
            (true, false) => {
                fmt_rational(&self.im, f)?;
                f.write_str(" i")
            }
            (false, false) => {
                fmt_rational(&self.re, f)?;
                if self.im.is_negative() {
                    f.write_str(" - ")?;
                    fmt_rational(&-self.im.clone(), f)?;
                } else {
                    f.write_str(" + ")?;
                    fmt_rational(&self.im, f)?;
                }
                f.write_str(" i")
            }
        }
    }
}

/// Canonical literal: `p/q`, `p/q i`, `p/q + r/s i`, optionally followed by
/// `sqrt n` (parenthesized coefficient when it has both parts).
impl fmt::Display for RadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand.is_one() {
            return write!(f, "{}", self.coeff);
        }
        if !self.coeff.re.is_zero() && !self.coeff.im.is_zero() {
            write!(f, "({}) sqrt {}", self.coeff, self.radicand)
        } else {
            write!(f, "{} sqrt {}", self.coeff, self.radicand)
        }
    }
}
