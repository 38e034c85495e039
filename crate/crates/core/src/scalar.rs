//! Scalar rings used throughout the crate.
//!
//! Every algebraic routine is generic over [`Ring`], so the same code runs on
//! exact rationals, gaussian rationals, `f64`, `Complex64`, truncated power
//! series ([`crate::poly::Jet`]) and multivariate polynomials
//! ([`crate::poly::MPoly`]).
//!
//! - [`Rational`]: arbitrary precision rational, the default exact scalar
//! - [`parse_rational`] / [`format_rational`]: the `"p/q"` text form
//! - [`Ring`]: commutative ring with unit, embedding of the rationals and a
//!   partial inverse

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;
pub type GaussianRational = Complex<Rational>;

/// Builds `p/q` as an exact rational. Panics if `q == 0`.
pub fn q(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as an exact rational.
pub fn qi(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part: BigInt = if frac.is_empty() { BigInt::zero() } else { frac.parse().ok()? };
        let magnitude = int_part.abs() * &scale + frac_part;
        let num = if neg { -magnitude } else { magnitude };
        return Some(Rational::new(num, scale));
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Formats a rational as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Binomial coefficient `C(n, k)` with the convention that negative or
/// out-of-range arguments give zero.
pub fn binomial(n: i64, k: i64) -> Rational {
    if n < 0 || k < 0 || k > n {
        return <Rational as Zero>::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// A commutative ring with unit.
///
/// `try_inv` returns `None` for non-units (or exact zero). `magnitude` is a
/// nonnegative size used to measure residuals: for exact rings it is `0` for
/// zero and positive otherwise.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(r: &Rational) -> Self;
    fn try_inv(&self) -> Option<Self>;
    fn magnitude(&self) -> f64;

    fn from_int(i: i64) -> Self {
        Self::from_rational(&qi(i))
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn scale_q(&self, r: &Rational) -> Self {
        self.clone() * Self::from_rational(r)
    }
}

impl Ring for Rational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn try_inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn magnitude(&self) -> f64 {
        if Zero::is_zero(self) {
            0.0
        } else {
            rational_to_f64(&self.abs()).max(f64::MIN_POSITIVE)
        }
    }
}

impl Ring for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn try_inv(&self) -> Option<Self> {
        if *self == 0.0 || !self.is_finite() {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Ring for Complex64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_rational(r: &Rational) -> Self {
        Complex64::new(rational_to_f64(r), 0.0)
    }
    fn try_inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Ring for GaussianRational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Complex::new(<Rational as Zero>::zero(), <Rational as Zero>::zero())
    }
    fn one() -> Self {
        Complex::new(<Rational as One>::one(), <Rational as Zero>::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn from_rational(r: &Rational) -> Self {
        Complex::new(r.clone(), <Rational as Zero>::zero())
    }
    fn try_inv(&self) -> Option<Self> {
        let n = &self.re * &self.re + &self.im * &self.im;
        if Zero::is_zero(&n) {
            return None;
        }
        Some(Complex::new(&self.re / &n, -&self.im / &n))
    }
    fn magnitude(&self) -> f64 {
        Ring::magnitude(&self.re) + Ring::magnitude(&self.im)
    }
}

/// Ring values that can be read back as complex floats, used by the
/// float-facing parts (eigen solvers, root finding, reports).
pub trait ToComplex {
    fn to_c64(&self) -> Complex64;
}

impl ToComplex for Rational {
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
}

impl ToComplex for f64 {
    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
}

impl ToComplex for Complex64 {
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

impl ToComplex for GaussianRational {
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_roundtrip() {
        for s in ["3/4", "-7/2", "5", "0", "-12/5"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), q(-3, 2));
        assert_eq!(parse_rational("6/4").unwrap(), q(3, 2));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("abc").is_none());
    }

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(5, 2), qi(10));
        assert_eq!(binomial(5, 0), qi(1));
        assert_eq!(binomial(5, 6), qi(0));
        assert_eq!(binomial(-1, 0), qi(0));
        assert_eq!(binomial(3, -1), qi(0));
    }

    #[test]
    fn ring_pow_and_inverse() {
        assert_eq!(Ring::pow(&q(2, 3), 3), q(8, 27));
        assert_eq!(Ring::try_inv(&q(-2, 5)), Some(q(-5, 2)));
        assert!(Ring::try_inv(&qi(0)).is_none());
        let g = GaussianRational::new(qi(1), qi(2));
        let inv = g.try_inv().unwrap();
        assert_eq!(g * inv, <GaussianRational as Ring>::one());
    }
}
