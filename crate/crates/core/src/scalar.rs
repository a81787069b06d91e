//! Coefficient rings used throughout: exact rationals and `f64`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact rational scalar (arbitrary precision).
pub type Q = BigRational;

/// Ring of coefficients for multivectors and polynomials.
///
/// Implemented for [`Q`] (exact mode) and `f64` (float mode).  Conversion
/// between the two is explicit via [`Coeff::to_f64`] and [`Coeff::from_q`].
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_int(v: i64) -> Self;
    fn from_q(q: &Q) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact division by a nonzero integer.
    fn div_int(&self, v: i64) -> Self;
}

impl Coeff for Q {
    fn from_int(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        q_to_f64(self)
    }
    fn div_int(&self, v: i64) -> Self {
        self / Q::from_integer(BigInt::from(v))
    }
}

impl Coeff for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn from_q(q: &Q) -> Self {
        q_to_f64(q)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn div_int(&self, v: i64) -> Self {
        self / v as f64
    }
}

/// Rational from an integer pair.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Integer rational.
pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Lossy conversion with enough care for the magnitudes used here.
pub fn q_to_f64(v: &Q) -> f64 {
    // Direct conversion can overflow for large numerator/denominator pairs;
    // scale both down by the larger bit length first.
    let num = v.numer();
    let den = v.denom();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift = (nb.max(db) - 52).max(0) as u64;
    let n = (num >> shift).to_string().parse::<f64>().unwrap_or(f64::NAN);
    let d = (den >> shift).to_string().parse::<f64>().unwrap_or(f64::NAN);
    if d == 0.0 {
        // Denominator underflowed the shift; fall back to sign * magnitude.
        if num.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        n / d
    }
}

/// Exact factorial as a rational.
pub fn q_factorial(k: u64) -> Q {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    Q::from_integer(acc)
}

/// Gamma at a half-integer argument, split into `rational * pi^(1/2 * half_powers)`.
///
/// `two_a` is `2a` for the argument `a`; returns `(r, p)` with
/// `Gamma(a) = r * pi^(p/2)` where `p` is 0 for integer `a` and 1 otherwise.
pub fn gamma_half_exact(two_a: u64) -> (Q, u32) {
    assert!(two_a > 0, "gamma argument must be positive");
    if two_a % 2 == 0 {
        (q_factorial(two_a / 2 - 1), 0)
    } else {
        // Gamma(k + 1/2) = (2k)! / (4^k k!) * sqrt(pi)
        let k = (two_a - 1) / 2;
        let r = q_factorial(2 * k) / (q_factorial(k) * Q::from_integer(BigInt::from(4u8).pow(k as u32)));
        (r, 1)
    }
}

/// Surface area of the unit k-sphere, `2 pi^((k+1)/2) / Gamma((k+1)/2)`.
pub fn sphere_area(k: u32) -> f64 {
    let (g, half) = gamma_half_exact((k + 1) as u64);
    let pi = std::f64::consts::PI;
    2.0 * pi.powf((k as f64 + 1.0) / 2.0) / (q_to_f64(&g) * pi.powf(half as f64 / 2.0))
}
