//! Coefficient fields: exact Gaussian rationals and IEEE double complex.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::rounding::Enclosure;

/// Exact complex numbers with arbitrary-precision rational parts.
pub type Exact = Complex<BigRational>;

/// Default equality tolerance for double-precision mode.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Lossless textual form of a scalar: rationals as `"p/q"` (or `"p"`),
/// doubles in shortest round-trip decimal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarRepr {
    pub re: String,
    pub im: String,
}

/// The field operations the algebra needs, in either arithmetic mode.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// True for error-free arithmetic.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn from_complex_rational(re: &BigRational, im: &BigRational) -> Self;
    /// Lossless in exact mode (every finite double is a rational).
    fn from_c64(z: Complex64) -> Self;

    /// Exact zero test.
    fn is_zero(&self) -> bool;
    /// Zero within `tol` in double mode; exact zero test otherwise.
    fn is_negligible(&self, tol: f64) -> bool;
    fn recip(&self) -> Option<Self>;
    fn to_c64(&self) -> Complex64;
    /// Guaranteed enclosure of the modulus.
    fn abs_enclosure(&self) -> Enclosure;
    /// Modulus as a plain double (no rounding guarantee).
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn to_repr(&self) -> ScalarRepr;
    fn conj(&self) -> Self;

    /// `self += a * b` without cloning the operands.
    fn add_mul(&mut self, a: &Self, b: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn add_ref(&self, other: &Self) -> Self;

    /// Turns an approximate zero of `coeffs` into a usable anchor: an exact
    /// zero in exact mode (or `None` if the nearby zero is not a Gaussian
    /// rational), the value itself in double mode.
    fn snap_root(coeffs: &[Self], approx: Complex64) -> Option<Self>;

    /// Approximate equality; exact equality in exact mode.
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.to_c64() - other.to_c64()).norm() <= tol
        }
    }
}

pub(crate) fn rational_repr(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn rational_enclosure_abs(q: &BigRational) -> Enclosure {
    Enclosure::from_rational(&q.abs()).nonneg()
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn from_int(v: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }
    fn from_rational(q: &BigRational) -> Self {
        Complex::new(q.clone(), BigRational::zero())
    }
    fn from_complex_rational(re: &BigRational, im: &BigRational) -> Self {
        Complex::new(re.clone(), im.clone())
    }
    fn from_c64(z: Complex64) -> Self {
        let conv = |x: f64| BigRational::from_float(x).unwrap_or_else(BigRational::zero);
        Complex::new(conv(z.re), conv(z.im))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn is_negligible(&self, _tol: f64) -> bool {
        Scalar::is_zero(self)
    }
    fn recip(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            return None;
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(Complex::new(&self.re / &n, -(&self.im / &n)))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn abs_enclosure(&self) -> Enclosure {
        if self.im.is_zero() {
            return rational_enclosure_abs(&self.re);
        }
        if self.re.is_zero() {
            return rational_enclosure_abs(&self.im);
        }
        Enclosure::hypot_nonneg(
            rational_enclosure_abs(&self.re),
            rational_enclosure_abs(&self.im),
        )
    }
    fn to_repr(&self) -> ScalarRepr {
        ScalarRepr {
            re: rational_repr(&self.re),
            im: rational_repr(&self.im),
        }
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        if Scalar::is_zero(a) || Scalar::is_zero(b) {
            return;
        }
        if a.im.is_zero() && b.im.is_zero() {
            self.re += &a.re * &b.re;
            return;
        }
        self.re += &a.re * &b.re - &a.im * &b.im;
        self.im += &a.re * &b.im + &a.im * &b.re;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = <Self as Scalar>::zero();
        out.add_mul(self, other);
        out
    }
    fn add_ref(&self, other: &Self) -> Self {
        Complex::new(&self.re + &other.re, &self.im + &other.im)
    }
    fn snap_root(coeffs: &[Self], approx: Complex64) -> Option<Self> {
        crate::roots::snap_gaussian_rational(coeffs, approx)
    }
}

fn f64_repr(x: f64) -> String {
    // shortest representation that parses back to the same double
    format!("{x:?}")
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_int(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_rational(q: &BigRational) -> Self {
        Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_complex_rational(re: &BigRational, im: &BigRational) -> Self {
        Complex64::new(
            re.to_f64().unwrap_or(f64::NAN),
            im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_negligible(&self, tol: f64) -> bool {
        self.norm() <= tol
    }
    fn recip(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(self.inv())
        }
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn abs_enclosure(&self) -> Enclosure {
        Enclosure::hypot_nonneg(
            Enclosure::exact(self.re.abs()),
            Enclosure::exact(self.im.abs()),
        )
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_repr(&self) -> ScalarRepr {
        ScalarRepr {
            re: f64_repr(self.re),
            im: f64_repr(self.im),
        }
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn snap_root(_coeffs: &[Self], approx: Complex64) -> Option<Self> {
        Some(approx)
    }
}

/// `p/q` as an exact rational.
pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Parses `"p/q"`, `"p"`, or a plain decimal such as `"-0.125"` or `"1e-3"`
/// into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

/// Parses a [`ScalarRepr`] into either scalar mode.
pub fn scalar_from_repr<S: Scalar>(repr: &ScalarRepr) -> Option<S> {
    if S::EXACT {
        Some(S::from_complex_rational(
            &parse_rational(&repr.re)?,
            &parse_rational(&repr.im)?,
        ))
    } else {
        let re: f64 = repr.re.trim().parse().ok().or_else(|| {
            parse_rational(&repr.re).and_then(|q| q.to_f64())
        })?;
        let im: f64 = repr.im.trim().parse().ok().or_else(|| {
            parse_rational(&repr.im).and_then(|q| q.to_f64())
        })?;
        Some(S::from_c64(Complex64::new(re, im)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_rational("3/6"), Some(q(1, 2)));
        assert_eq!(parse_rational("-7"), Some(q(-7, 1)));
        assert_eq!(parse_rational("0.125"), Some(q(1, 8)));
        assert_eq!(parse_rational("-1.5e2"), Some(q(-150, 1)));
        assert_eq!(parse_rational("2.5E-1"), Some(q(1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn exact_recip_and_repr() {
        let z = Exact::from_complex_rational(&q(1, 1), &q(1, 1));
        let inv = Scalar::recip(&z).unwrap();
        assert_eq!(inv.to_repr(), ScalarRepr { re: "1/2".into(), im: "-1/2".into() });
        assert_eq!(z.mul_ref(&inv), <Exact as Scalar>::one());
        assert!(Scalar::recip(&<Exact as Scalar>::zero()).is_none());
    }

    #[test]
    fn repr_round_trips_in_both_modes() {
        let z = Exact::from_complex_rational(&q(-3, 7), &q(5, 2));
        assert_eq!(scalar_from_repr::<Exact>(&z.to_repr()), Some(z));
        let w = Complex64::new(0.1, -1.0 / 3.0);
        assert_eq!(scalar_from_repr::<Complex64>(&w.to_repr()), Some(w));
    }

    #[test]
    fn abs_enclosure_contains_modulus() {
        let z = Exact::from_complex_rational(&q(3, 10), &q(-4, 10));
        assert!(z.abs_enclosure().contains(0.5));
        let w = Complex64::new(3.0, 4.0);
        assert!(w.abs_enclosure().contains(5.0));
    }
}
