//! Coefficient rings for stencil formulas.
//!
//! Everything algebraic is done over exact rationals; experiments run the
//! same structures over `f64` or `Complex64`. No other rings are supported.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar (arbitrary precision, always reduced, denominator > 0).
pub type Rational = BigRational;

/// Build a rational from an integer pair. Panics on zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact conversion of a finite `f64` into a rational (floats are dyadic).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_f64(x)
}

/// Canonical `p/q` rendering used in JSON and the CLI (denominator always shown).
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parse `p/q`, a bare integer, or a plain decimal literal like `32.121`,
/// all exactly.
pub fn parse_number(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let (neg, int) = match int.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, int),
        };
        let int: BigInt = if int.is_empty() { BigInt::zero() } else { int.parse().ok()? };
        let num: BigInt = frac.parse().ok()?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let mut v = Rational::new(int * &den + num, den);
        if neg {
            v = -v;
        }
        Some(v)
    } else {
        parse_rational(s)
    }
}

/// Parse `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().ok()?;
            Some(Rational::from_integer(p))
        }
    }
}

/// Ring operations shared by the three supported coefficient types.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_int(n: i64) -> Self;

    /// `self^k` by repeated multiplication (exponents here are small).
    fn int_pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for Rational {
    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
}

impl Scalar for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
}

impl Scalar for Complex64 {
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
}

/// Field scalars additionally support division and a magnitude, which is all
/// the linear solvers need (pivot selection works on magnitudes).
pub trait FieldScalar: Scalar + Div<Output = Self> {
    fn magnitude(&self) -> f64;

    /// Multiplication by a real constant.
    fn scale(&self, t: f64) -> Self;
}

impl FieldScalar for Rational {
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn scale(&self, t: f64) -> Self {
        // Exact: every finite f64 is a rational.
        self * Rational::from_f64(t).expect("finite scale factor")
    }
}

impl FieldScalar for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn scale(&self, t: f64) -> Self {
        self * t
    }
}

impl FieldScalar for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn scale(&self, t: f64) -> Self {
        self * t
    }
}
