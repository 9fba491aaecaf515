//! Symmetric finite-difference formulas and their convolution algebra.
//!
//! A formula stores the half-sequence `c_0..c_T` of an even, finitely
//! supported sequence (`b_{-j} = b_j`). Convolution makes these a commutative
//! algebra, and every formula is a polynomial in the base second-difference
//! stencil `a = 2*1_{0} - 1_{±1}`, which is what ties stencils to polynomials
//! everywhere else in this crate.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poly::RationalPolynomial;
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};

/// Even, finitely supported coefficient sequence; `coeffs[j]` is the weight
/// of `1_{±j}`. Canonically trimmed: the last stored coefficient is nonzero,
/// and the zero formula stores nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricFormula<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> SymmetricFormula<S> {
    /// Build from the half-sequence `c_0..c_T`, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        SymmetricFormula { coeffs }
    }

    pub fn zero() -> Self {
        SymmetricFormula { coeffs: Vec::new() }
    }

    /// The Kronecker formula `v * 1_{0}`.
    pub fn singleton(v: S) -> Self {
        Self::new(vec![v])
    }

    /// The base stencil `a = 2*1_{0} - 1_{±1}` (it sends samples of a smooth
    /// `u` to `-h^2 u'' + O(h^4)`).
    pub fn base_stencil() -> Self {
        Self::new(vec![S::from_int(2), S::from_int(-1)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stencil radius: the largest index with a nonzero weight.
    /// `None` for the zero formula (a sentinel, deliberately not a number).
    pub fn radius(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Weight at index `±j`; zero beyond the radius.
    pub fn coeff(&self, j: usize) -> S {
        self.coeffs.get(j).cloned().unwrap_or_else(S::zero)
    }

    /// Half-sequence view `c_0..c_T`.
    pub fn half_coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|j| self.coeff(j) + other.coeff(j)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|j| self.coeff(j) - other.coeff(j)).collect())
    }

    pub fn scale(&self, v: &S) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * v.clone()).collect())
    }

    /// Convolution product `(f*g)_i = sum_j f_j g_{i-j}`.
    pub fn convolve(&self, other: &Self) -> Self {
        let (tf, tg) = match (self.radius(), other.radius()) {
            (Some(tf), Some(tg)) => (tf as i64, tg as i64),
            _ => return Self::zero(),
        };
        let mut out = Vec::with_capacity((tf + tg + 1) as usize);
        for i in 0..=(tf + tg) {
            let mut acc = S::zero();
            for j in -tf..=tf {
                let k = i - j;
                if k.abs() <= tg {
                    acc = acc
                        + self.coeff(j.unsigned_abs() as usize)
                            * other.coeff(k.unsigned_abs() as usize);
                }
            }
            out.push(acc);
        }
        Self::new(out)
    }

    /// Convolution power `a^(*n)` of the base stencil, via the closed form
    /// `(a^n)_{±k} = (-1)^k (2n)! / ((n+k)!(n-k)!)`.
    pub fn base_power(n: usize) -> Self {
        assert!(n <= 31, "base_power overflows i64 beyond n = 31");
        let mut out = Vec::with_capacity(n + 1);
        for k in 0..=n {
            // (2n)!/((n+k)!(n-k)!) = C(2n, n-k), an integer.
            let b = binomial_i64(2 * n as u64, (n - k) as u64);
            let signed = if k % 2 == 0 { b } else { -b };
            out.push(S::from_int(signed));
        }
        Self::new(out)
    }

    /// Evaluate a polynomial (degree-indexed coefficients) at the base
    /// stencil, i.e. `sum_k p_k a^(*k)`, by Horner in the algebra.
    pub fn from_base_polynomial(coeffs: &[S]) -> Self {
        let a = Self::base_stencil();
        let mut acc = Self::zero();
        for c in coeffs.iter().rev() {
            acc = acc.convolve(&a).add(&Self::singleton(c.clone()));
        }
        acc
    }

    /// Moment `sum_{j in Z} c_j j^k`; exactly zero for odd `k` by symmetry.
    pub fn moment(&self, k: u32) -> S {
        if k % 2 == 1 {
            return S::zero();
        }
        let mut acc = if k == 0 { self.coeff(0) } else { S::zero() };
        for j in 1..self.coeffs.len() {
            let jk = S::from_int(j as i64).int_pow(k);
            acc = acc + S::from_int(2) * self.coeff(j) * jk;
        }
        acc
    }
}

fn binomial_i64(n: u64, k: u64) -> i64 {
    num_integer::binomial(n as u128, k as u128)
        .to_i64()
        .expect("binomial fits i64")
}

impl SymmetricFormula<Rational> {
    /// The unique polynomial `P` with `P(a) = self`, found by peeling the
    /// leading stencil weight (the top coefficient of `a^(*n)` is `(-1)^n`).
    pub fn to_base_polynomial(&self) -> RationalPolynomial {
        let t = match self.radius() {
            None => return RationalPolynomial::zero(),
            Some(t) => t,
        };
        let a = Self::base_stencil();
        let mut powers = Vec::with_capacity(t + 1);
        powers.push(Self::singleton(Rational::from_int(1)));
        for k in 1..=t {
            let prev: &SymmetricFormula<Rational> = &powers[k - 1];
            powers.push(prev.convolve(&a));
        }
        let mut work = self.clone();
        let mut coeffs = vec![Rational::zero(); t + 1];
        for k in (0..=t).rev() {
            let lead = work.coeff(k);
            let pk = if k % 2 == 0 { lead } else { -lead };
            work = work.sub(&powers[k].scale(&pk));
            coeffs[k] = pk;
        }
        debug_assert!(work.is_zero(), "free-module inversion left a remainder");
        RationalPolynomial::new(coeffs)
    }

    pub fn to_f64(&self) -> SymmetricFormula<f64> {
        SymmetricFormula::new(
            self.coeffs
                .iter()
                .map(|c| c.to_f64().expect("rational fits f64"))
                .collect(),
        )
    }

    /// JSON form `{"coeffs": ["2/1", "-1/1"]}`.
    pub fn to_json(&self) -> Value {
        json!({ "coeffs": self.coeffs.iter().map(format_rational).collect::<Vec<_>>() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::BadFormulaJson("missing `coeffs` array".into()))?;
        let mut coeffs = Vec::with_capacity(arr.len());
        for item in arr {
            let s = item
                .as_str()
                .ok_or_else(|| Error::BadFormulaJson(format!("expected string, got {item}")))?;
            let r = parse_rational(s)
                .ok_or_else(|| Error::BadFormulaJson(format!("bad rational `{s}`")))?;
            coeffs.push(r);
        }
        Ok(Self::new(coeffs))
    }
}

impl SymmetricFormula<f64> {
    /// JSON form with plain decimal literals.
    pub fn to_json(&self) -> Value {
        json!({ "coeffs": self.coeffs.clone() })
    }

    pub fn to_complex(&self) -> SymmetricFormula<Complex64> {
        SymmetricFormula::new(
            self.coeffs
                .iter()
                .map(|c| Complex64::new(*c, 0.0))
                .collect(),
        )
    }
}
