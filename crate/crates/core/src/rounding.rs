//! Outward-rounded real enclosures.
//!
//! Every basic IEEE operation is correctly rounded, so nudging its result one
//! ulp outward yields a guaranteed enclosure of the exact result. `exp`, `ln`
//! and `hypot` come from the platform libm, which is accurate to about one
//! ulp; those get two ulps of widening.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Closed interval `[lo, hi]` containing an unknown exact real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64) -> f64 {
    if x == 0.0 {
        // keeps exact zeros exact
        -f64::MIN_POSITIVE * f64::EPSILON
    } else {
        x.next_down()
    }
}

fn up(x: f64) -> f64 {
    if x == 0.0 {
        f64::MIN_POSITIVE * f64::EPSILON
    } else {
        x.next_up()
    }
}

impl Enclosure {
    pub const ZERO: Enclosure = Enclosure { lo: 0.0, hi: 0.0 };
    pub const ONE: Enclosure = Enclosure { lo: 1.0, hi: 1.0 };

    /// A point enclosure; `x` must be exactly representable.
    pub fn exact(x: f64) -> Self {
        Enclosure { lo: x, hi: x }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted enclosure [{lo}, {hi}]");
        Enclosure { lo, hi }
    }

    /// Encloses a value computed with at most `ulps` units of rounding error.
    pub fn around(x: f64, ulps: u32) -> Self {
        let (mut lo, mut hi) = (x, x);
        for _ in 0..ulps {
            lo = down(lo);
            hi = up(hi);
        }
        Enclosure { lo, hi }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::ZERO;
        }
        if q.denom() == &num_bigint::BigInt::from(1) {
            if let Some(v) = q.numer().to_i64() {
                if v.unsigned_abs() < (1u64 << 53) {
                    return Self::exact(v as f64);
                }
            }
        }
        let x = q.to_f64().unwrap_or(if q.is_positive() {
            f64::MAX
        } else {
            f64::MIN
        });
        Self::around(x, 2)
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Clamps the lower end at zero, for quantities known to be non-negative.
    pub fn nonneg(self) -> Self {
        Enclosure {
            lo: self.lo.max(0.0),
            hi: self.hi.max(0.0),
        }
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Enclosure {
                lo: 0.0,
                hi: self.hi.max(-self.lo),
            }
        }
    }

    pub fn max(self, other: Self) -> Self {
        Enclosure {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn exp(self) -> Self {
        let lo = down(down(self.lo.exp())).max(0.0);
        let hi = up(up(self.hi.exp()));
        Enclosure { lo, hi }
    }

    /// Natural log; the argument must be strictly positive.
    pub fn ln(self) -> Self {
        debug_assert!(self.lo > 0.0);
        Enclosure {
            lo: down(down(self.lo.ln())),
            hi: up(up(self.hi.ln())),
        }
    }

    /// Integer power for a non-negative base.
    pub fn powi_nonneg(self, n: u32) -> Self {
        let mut acc = Self::ONE;
        for _ in 0..n {
            acc = acc * self;
        }
        acc.nonneg()
    }

    /// `sqrt(a^2 + b^2)` for enclosures of non-negative `a`, `b`.
    pub fn hypot_nonneg(a: Self, b: Self) -> Self {
        if b.hi == 0.0 {
            return a;
        }
        if a.hi == 0.0 {
            return b;
        }
        Enclosure {
            lo: down(down(a.lo.max(0.0).hypot(b.lo.max(0.0)))).max(0.0),
            hi: up(up(a.hi.hypot(b.hi))),
        }
    }
}

impl From<f64> for Enclosure {
    fn from(x: f64) -> Self {
        Enclosure::exact(x)
    }
}

impl Neg for Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Add for Enclosure {
    type Output = Enclosure;
    fn add(self, o: Enclosure) -> Enclosure {
        let lo = self.lo + o.lo;
        let hi = self.hi + o.hi;
        Enclosure {
            lo: if self.lo == 0.0 || o.lo == 0.0 { lo } else { down(lo) },
            hi: if self.hi == 0.0 || o.hi == 0.0 { hi } else { up(hi) },
        }
    }
}

impl Sub for Enclosure {
    type Output = Enclosure;
    fn sub(self, o: Enclosure) -> Enclosure {
        self + (-o)
    }
}

impl Mul for Enclosure {
    type Output = Enclosure;
    fn mul(self, o: Enclosure) -> Enclosure {
        if self == Self::ZERO || o == Self::ZERO {
            return Self::ZERO;
        }
        let cands = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = cands.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = cands.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let nonneg = self.lo >= 0.0 && o.lo >= 0.0;
        Enclosure {
            lo: if nonneg { down(lo).max(0.0) } else { down(lo) },
            hi: up(hi),
        }
    }
}

impl Div for Enclosure {
    type Output = Enclosure;
    /// The divisor must not contain zero.
    fn div(self, o: Enclosure) -> Enclosure {
        debug_assert!(o.lo > 0.0 || o.hi < 0.0, "division by enclosure containing 0");
        let cands = [
            self.lo / o.lo,
            self.lo / o.hi,
            self.hi / o.lo,
            self.hi / o.hi,
        ];
        let lo = cands.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = cands.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Enclosure {
            lo: down(lo),
            hi: up(hi),
        }
    }
}

/// Upper bound of a sum of non-negative terms.
pub fn sum_up<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().fold(0.0, |acc, t| {
        if t == 0.0 {
            acc
        } else {
            up(acc + t)
        }
    })
}

/// Upper bound of the product of two non-negative reals.
pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p == 0.0 {
        0.0
    } else {
        up(p)
    }
}

/// Lower bound of the product of two non-negative reals.
pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p == 0.0 {
        0.0
    } else {
        down(p).max(0.0)
    }
}

/// Lower bound of the sum of two non-negative reals.
pub fn add_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        b
    } else if b == 0.0 {
        a
    } else {
        down(a + b).max(0.0)
    }
}

pub fn add_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        b
    } else if b == 0.0 {
        a
    } else {
        up(a + b)
    }
}

pub fn next_up(x: f64) -> f64 {
    up(x)
}

pub fn next_down(x: f64) -> f64 {
    down(x)
}
