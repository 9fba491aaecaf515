//! Double-double arithmetic (about 32 significant digits).
//!
//! Used where an experiment must measure discretization errors near the f64
//! floor: assembling and factoring the operator in `Dd` removes the
//! `eps * kappa` contamination that plain f64 solves leave behind, without
//! leaving float mode. Algorithms are the classical error-free transforms
//! (two-sum, FMA-based two-product) and Dekker/Bailey add/mul/div.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

use crate::formula::SymmetricFormula;
use crate::scalar::{FieldScalar, Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bp = s - a;
    (s, (a - (s - bp)) + (b - bp))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // Requires |a| >= |b|.
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Round a rational to double-double (hi + lo with lo the residual).
    pub fn from_rational(r: &Rational) -> Self {
        let hi = r.to_f64().expect("value fits f64");
        let rest = r - Rational::from_float(hi).expect("finite");
        Dd::new(hi, rest.to_f64().unwrap_or(0.0))
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn to_f64(&self) -> f64 {
        self.hi + self.lo
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs.mul_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs.mul_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::new(s, e + q3)
    }
}

impl Dd {
    fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let (hi, lo) = quick_two_sum(p, e + self.lo * x);
        Dd { hi, lo }
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd { hi: 0.0, lo: 0.0 }
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd { hi: 1.0, lo: 0.0 }
    }
}

impl Scalar for Dd {
    fn from_int(n: i64) -> Self {
        Dd::from_f64(n as f64)
    }
}

impl FieldScalar for Dd {
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn scale(&self, t: f64) -> Self {
        self.mul_f64(t)
    }
}

impl SymmetricFormula<Rational> {
    pub fn to_dd(&self) -> SymmetricFormula<Dd> {
        SymmetricFormula::new(self.half_coeffs().iter().map(Dd::from_rational).collect())
    }
}
