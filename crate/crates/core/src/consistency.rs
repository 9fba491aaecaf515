//! Order-of-consistency computation and construction of interior weights and
//! boundary corrections.
//!
//! A pair `(d, s)` approximates `-u''` to order `n` exactly when
//! `sum_j d_j p(j) + s_j p''(j) = 0` for every polynomial `p` of degree at
//! most `n+1`. Symmetry kills odd monomials, so the test reduces to even
//! moments, which is what everything below manipulates.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::assembly::{apply_difference, source_action, Grid, Scheme};
use crate::error::{Error, Result};
use crate::formula::SymmetricFormula;
use crate::linalg::solve_dense;
use crate::poly::RationalPolynomial;
use crate::scalar::{format_rational, Rational, Scalar};
use crate::series::TruncatedSeries;

/// Outcome of an exact order search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsistencyOrder {
    /// Not consistent of any order (the zero-mean test already fails).
    Inconsistent,
    /// Consistent of exactly this (even) order.
    Exact(u32),
    /// Every test up to the search cap passed; true of the zero pair.
    AtLeast(u32),
}

impl ConsistencyOrder {
    pub fn is_at_least(&self, n: u32) -> bool {
        match *self {
            ConsistencyOrder::Inconsistent => false,
            ConsistencyOrder::Exact(k) => k >= n,
            ConsistencyOrder::AtLeast(k) => k >= n,
        }
    }

    /// Strictly below a target order; used by the maximality checks.
    pub fn is_below(&self, n: u32) -> bool {
        !self.is_at_least(n)
    }
}

/// Default cap for the order search; keeps the zero pair from looping.
pub const DEFAULT_ORDER_CAP: u32 = 64;

/// Value of the degree-`k` monomial test, `sum_j d_j j^k + k(k-1) s_j j^{k-2}`
/// for even `k` (odd monomials vanish by symmetry).
fn monomial_test<S: Scalar>(d: &SymmetricFormula<S>, s: &SymmetricFormula<S>, k: u32) -> S {
    if k == 0 {
        return d.moment(0);
    }
    d.moment(k) + S::from_int((k * (k - 1)) as i64) * s.moment(k - 2)
}

fn order_from_tests<S: Scalar>(
    d: &SymmetricFormula<S>,
    s: &SymmetricFormula<S>,
    cap: u32,
    is_zero: impl Fn(&S) -> bool,
) -> ConsistencyOrder {
    let mut k = 0;
    while k <= cap {
        if !is_zero(&monomial_test(d, s, k)) {
            return if k == 0 {
                ConsistencyOrder::Inconsistent
            } else {
                ConsistencyOrder::Exact(k - 2)
            };
        }
        k += 2;
    }
    ConsistencyOrder::AtLeast(cap)
}

/// Exact order of consistency of `(d, s)`, searched up to `cap`.
pub fn exact_order(
    d: &SymmetricFormula<Rational>,
    s: &SymmetricFormula<Rational>,
    cap: u32,
) -> ConsistencyOrder {
    order_from_tests(d, s, cap, |v| v.is_zero())
}

/// Floating-point diagnostic variant; the zero test is `|value| <= tol` and
/// the tolerance must be supplied explicitly.
pub fn exact_order_float(
    d: &SymmetricFormula<f64>,
    s: &SymmetricFormula<f64>,
    tol: f64,
    cap: u32,
) -> Result<ConsistencyOrder> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    Ok(order_from_tests(d, s, cap, |v| v.abs() <= tol))
}

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).map(BigInt::from).product::<BigInt>().max(BigInt::one())
}

pub(crate) fn big_binomial(n: u64, k: u64) -> BigInt {
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// Formal Fourier transform of a symmetric formula, as a truncated series:
/// `sum_k (-1)^k m_{2k}(d) X^{2k} / (2k)!` up to `X^order`.
pub fn fourier_series(d: &SymmetricFormula<Rational>, order: usize) -> TruncatedSeries {
    let mut coeffs = vec![Rational::zero(); order + 1];
    let mut k = 0usize;
    while 2 * k <= order {
        let m = d.moment(2 * k as u32);
        let mut c = m / Rational::from_integer(factorial(2 * k as u32));
        if k % 2 == 1 {
            c = -c;
        }
        coeffs[2 * k] = c;
        k += 1;
    }
    TruncatedSeries::new(coeffs)
}

/// Fourier-side consistency test: transform of `d` equals `X^2` times the
/// transform of `s` modulo `X^{n+2}`. Exact, and equivalent to
/// `exact_order(d, s) >= n`.
pub fn fourier_check(
    d: &SymmetricFormula<Rational>,
    s: &SymmetricFormula<Rational>,
    n: u32,
) -> bool {
    let order = (n + 1) as usize;
    let fd = fourier_series(d, order);
    let fs = fourier_series(s, order);
    let mut shifted = vec![Rational::zero(); order + 1];
    for k in 2..=order {
        shifted[k] = fs.coeff(k - 2);
    }
    fd.sub(&TruncatedSeries::new(shifted)).is_zero()
}

/// Coefficients of the square of the inverse sine function,
/// `asin(X)^2 = sum_{t>=1} 2^{2t-1} / (t^2 C(2t,t)) X^{2t}`, up to `X^order`.
pub fn arcsin_sq_series(order: usize) -> TruncatedSeries {
    let mut coeffs = vec![Rational::zero(); order + 1];
    let mut t = 1usize;
    while 2 * t <= order {
        let num = BigInt::one() << (2 * t - 1);
        let den = BigInt::from((t * t) as u64) * big_binomial(2 * t as u64, t as u64);
        coeffs[2 * t] = Rational::new(num, den);
        t += 1;
    }
    TruncatedSeries::new(coeffs)
}

fn substitute_4x2(p: &RationalPolynomial, order: usize) -> TruncatedSeries {
    // p(4 X^2) truncated at X^order.
    let mut coeffs = vec![Rational::zero(); order + 1];
    for (k, c) in p.coeffs().iter().enumerate() {
        if 2 * k > order {
            break;
        }
        coeffs[2 * k] = c.clone() * Rational::from_int(4).int_pow(k as u32);
    }
    TruncatedSeries::new(coeffs)
}

/// Polynomial-side consistency test:
/// `P(4X^2) = 4 asin(X)^2 Q(4X^2) mod X^{n+2}`, equivalent to
/// `exact_order(P(a), Q(a)) >= n`.
pub fn arcsin_check(p: &RationalPolynomial, q: &RationalPolynomial, n: u32) -> bool {
    let order = (n + 1) as usize;
    let lhs = substitute_4x2(p, order);
    let rhs = arcsin_sq_series(order)
        .mul(&substitute_4x2(q, order))
        .scale(&Rational::from_int(4));
    lhs.sub(&rhs).is_zero()
}

/// Shared Vandermonde solve: find the symmetric formula `w` with
/// `tau(w) <= mu/2 - 1` whose even moments satisfy
/// `m_{2j}(w) = -2 * rhs_j * (2j)(2j-1) / (2j)(2j-1)`... concretely, the
/// system `sum_i x_i (i-1)^{2j-2} = rhs_j` with `x_1 = w_0/2, x_i = w_{i-1}`.
fn solve_moment_system(rhs: Vec<Rational>) -> Option<SymmetricFormula<Rational>> {
    let size = rhs.len();
    if size == 0 {
        return Some(SymmetricFormula::zero());
    }
    let matrix: Vec<Vec<Rational>> = (1..=size)
        .map(|j| {
            (1..=size)
                .map(|i| Rational::from_int((i - 1) as i64).int_pow(2 * j as u32 - 2))
                .collect()
        })
        .collect();
    let x = solve_dense(matrix, rhs)?;
    let mut coeffs = Vec::with_capacity(size);
    coeffs.push(Rational::from_int(2) * x[0].clone());
    coeffs.extend(x.into_iter().skip(1));
    Some(SymmetricFormula::new(coeffs))
}

/// Right-hand side `sign * sum_{t>0} tail(t) * (t^2/2, ..., t^mu/(mu(mu-1)))`
/// for a given tail of coefficients (1-indexed by distance).
fn moment_rhs(tail: impl Fn(usize) -> Rational, max_t: usize, mu: u32, sign: i64) -> Vec<Rational> {
    let size = (mu / 2) as usize;
    (1..=size)
        .map(|j| {
            let k = 2 * j as u32;
            let mut acc = Rational::zero();
            for t in 1..=max_t {
                let tk = Rational::from_int(t as i64).int_pow(k);
                acc += tail(t) * tk;
            }
            acc * Rational::from_int(sign) / Rational::from_int((k * (k - 1)) as i64)
        })
        .collect()
}

/// The unique interior weights `s` with `tau(s) <= n/2 - 1` making `(d, s)`
/// consistent of order `n`. Requires zero mean.
pub fn interior_weights(
    d: &SymmetricFormula<Rational>,
    n: u32,
) -> Result<SymmetricFormula<Rational>> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::OddOrder(n));
    }
    let mean = d.moment(0);
    if !mean.is_zero() {
        return Err(Error::NonZeroMean(format_rational(&mean)));
    }
    let tau = d.radius().unwrap_or(0);
    let rhs = moment_rhs(|t| d.coeff(t), tau, n, -1);
    // The Vandermonde nodes 0, 1, ..., n/2-1 are distinct, so this never fails.
    Ok(solve_moment_system(rhs).expect("distinct nodes"))
}

/// Boundary corrections `b^1..b^{tau(d)}` of order `mu` for the odd-extension
/// closure of `d`. Each has `tau(b^i) <= mu/2 - 1`, and the last one is
/// exactly zero. `mu = 0` is allowed and yields all-zero corrections.
///
/// Row `i` of the closed operator acting on samples of `u` with `u(0) = 0`
/// carries the defect `-sum_j dt_j u(x_j)` with `dt_j = d_{i+j}` for `j > 0`,
/// so `b^i` is the interior-weight solution for `-dt`: the moment right side
/// comes out with a plus sign.
pub fn boundary_corrections(
    d: &SymmetricFormula<Rational>,
    mu: u32,
) -> Result<Vec<SymmetricFormula<Rational>>> {
    if mu % 2 != 0 {
        return Err(Error::OddBoundaryOrder(mu));
    }
    let mean = d.moment(0);
    if !mean.is_zero() {
        return Err(Error::NonZeroMean(format_rational(&mean)));
    }
    let tau = match d.radius() {
        None => return Ok(Vec::new()),
        Some(t) => t,
    };
    (1..=tau)
        .map(|i| {
            let rhs = moment_rhs(|t| d.coeff(i + t), tau.saturating_sub(i), mu, 1);
            Ok(solve_moment_system(rhs).expect("distinct nodes"))
        })
        .collect()
}

/// Row residuals `|(D_N u)_j - h^2 (S_N f)_j|`, `j = 1..N`, for exact samples
/// of a manufactured pair `u, f = -u''` (evaluated in floating point).
pub fn residuals(
    scheme: &Scheme<f64>,
    u: &dyn Fn(f64) -> f64,
    f: &dyn Fn(f64) -> f64,
    n: usize,
) -> Vec<f64> {
    let grid = Grid::new(n);
    let h = grid.h();
    let u_ex: Vec<f64> = (1..=n).map(|j| u(grid.x(j as i64))).collect();
    let du = apply_difference(&scheme.d, &u_ex);
    let sf = source_action(scheme, f, n);
    du.iter()
        .zip(sf.iter())
        .map(|(a, b)| (a - h * h * b).abs())
        .collect()
}
