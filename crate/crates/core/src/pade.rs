//! Exact construction of the most efficient stencil pairs.
//!
//! Two independent routes are implemented and cross-checked:
//!
//! * rational approximation of the generating series
//!   `C(X) = 4 (asin(sqrt(X)/2) / sqrt(X))^2`, whose `[l/m]` table is normal,
//!   followed by evaluation at the base stencil;
//! * the direct moment linear system on the stencil weights.
//!
//! Both give the unique (up to scale) pair `(d, s)` with `tau(d) <= l+1`,
//! `tau(s) <= m` and order of consistency `2(l+m+1)`, normalized by
//! `sum_j d_j j^2 = -2`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::consistency::{big_binomial, exact_order, ConsistencyOrder};
use crate::error::{Error, Result};
use crate::formula::SymmetricFormula;
use crate::linalg::{nullspace, solve_dense};
use crate::poly::RationalPolynomial;
use crate::scalar::{Rational, Scalar};
use crate::series::TruncatedSeries;

/// Taylor coefficients of `C(X) = 4 (asin(sqrt(X)/2)/sqrt(X))^2`:
/// `c_t = 2 / ((t+1)^2 C(2t+2, t+1))`, exactly, up to `X^order`.
pub fn c_series(order: usize) -> TruncatedSeries {
    let coeffs = (0..=order)
        .map(|t| {
            let den = BigInt::from(((t + 1) * (t + 1)) as u64)
                * big_binomial(2 * t as u64 + 2, t as u64 + 1);
            Rational::new(BigInt::one() + BigInt::one(), den)
        })
        .collect();
    TruncatedSeries::new(coeffs)
}

/// A solved rational approximation problem for `C`: numerator `R` (deg `<= l`),
/// denominator `Q` (deg `<= m`), normalized `R(0) = 1`, and
/// `val(R - C Q) = l + m + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PadePair {
    pub numerator: RationalPolynomial,
    pub denominator: RationalPolynomial,
    pub l: usize,
    pub m: usize,
}

/// Solve `R = C Q mod X^{l+m+1}` exactly. The solution space must be
/// one-dimensional (the table of `C` is normal); anything else is reported
/// as an internal error rather than patched over.
pub fn approximant(l: usize, m: usize) -> Result<PadePair> {
    let c = c_series(l + m + 1);
    let rows = l + m + 1;
    let cols = l + m + 2;
    // Unknowns: r_0..r_l, q_0..q_m. Equation k: r_k - sum_j c_{k-j} q_j = 0.
    let mut matrix = vec![vec![Rational::zero(); cols]; rows];
    for (k, row) in matrix.iter_mut().enumerate() {
        if k <= l {
            row[k] = Rational::one();
        }
        for j in 0..=m.min(k) {
            row[l + 1 + j] = -c.coeff(k - j);
        }
    }
    let basis = nullspace(matrix);
    if basis.len() != 1 {
        return Err(Error::DegenerateApproximant {
            l,
            m,
            dim: basis.len(),
        });
    }
    let v = &basis[0];
    if v[0].is_zero() {
        // R(0) = 0 would contradict normality of the table.
        return Err(Error::DegenerateApproximant { l, m, dim: 1 });
    }
    let inv = Rational::one() / v[0].clone();
    let numerator = RationalPolynomial::new(v[..=l].iter().map(|x| x * &inv).collect());
    let denominator =
        RationalPolynomial::new(v[l + 1..].iter().map(|x| x * &inv).collect());

    // Consequences of normality, asserted rather than assumed.
    assert_eq!(numerator.degree(), Some(l), "deg R = l");
    assert_eq!(denominator.degree(), Some(m), "deg Q = m");
    assert!(!denominator.eval(&Rational::zero()).is_zero(), "Q(0) != 0");
    let pair = PadePair {
        numerator,
        denominator,
        l,
        m,
    };
    assert_eq!(pair.defect_valuation(), Some(l + m + 1));
    Ok(pair)
}

impl PadePair {
    /// Valuation of `R - C Q` expanded through `X^{l+m+1}`; equals
    /// `l + m + 1` for a healthy pair.
    pub fn defect_valuation(&self) -> Option<usize> {
        let k = self.l + self.m + 1;
        let c = c_series(k);
        let r = TruncatedSeries::from_polynomial(&self.numerator, k);
        let q = TruncatedSeries::from_polynomial(&self.denominator, k);
        r.sub(&c.mul(&q)).valuation()
    }
}

/// An optimal pair `(d, s)` of order `2(l+m+1)` with the moment
/// normalization `sum_j d_j j^2 = -2`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalScheme {
    pub d: SymmetricFormula<Rational>,
    pub s: SymmetricFormula<Rational>,
    pub l: usize,
    pub m: usize,
    /// Interior order of consistency, `2(l+m+1)`.
    pub order: u32,
}

fn checked_scheme(
    d: SymmetricFormula<Rational>,
    s: SymmetricFormula<Rational>,
    l: usize,
    m: usize,
) -> OptimalScheme {
    let order = 2 * (l + m + 1) as u32;
    assert_eq!(d.radius(), Some(l + 1), "tau(d) = l + 1");
    assert_eq!(s.radius().unwrap_or(0), m, "tau(s) = m");
    assert_eq!(d.moment(2), Rational::from_int(-2), "moment normalization");
    assert_eq!(
        exact_order(&d, &s, order + 2),
        ConsistencyOrder::Exact(order),
        "optimal order 2(l+m+1)"
    );
    OptimalScheme { d, s, l, m, order }
}

/// Optimal formulas via the approximation route:
/// `d = (X R)(a)`, `s = Q(a)`.
pub fn optimal_scheme(l: usize, m: usize) -> Result<OptimalScheme> {
    let pair = approximant(l, m)?;
    let d = SymmetricFormula::from_base_polynomial(pair.numerator.shift_up().coeffs());
    let s = SymmetricFormula::from_base_polynomial(pair.denominator.coeffs());
    Ok(checked_scheme(d, s, l, m))
}

/// Optimal formulas via the direct `(l+m+3) x (l+m+3)` moment system on the
/// weights themselves. Must agree with `optimal_scheme` exactly.
pub fn optimal_scheme_direct(l: usize, m: usize) -> Result<OptimalScheme> {
    let size = l + m + 3;
    // Row layout: zero mean; normalization m_2(d)/2 = -1; then the
    // order conditions for monomial degrees 2, 4, ..., 2(l+m+1).
    // Moment row helper: first entry is 0^k/2 (with 0^0 = 1), then j^k.
    let moment_row = |k: u32, width: usize| -> Vec<Rational> {
        (0..width)
            .map(|j| {
                if j == 0 {
                    if k == 0 {
                        Rational::new(1.into(), 2.into())
                    } else {
                        Rational::zero()
                    }
                } else {
                    Rational::from_int(j as i64).int_pow(k)
                }
            })
            .collect()
    };
    let dw = l + 2;
    let sw = m + 1;
    let mut matrix = Vec::with_capacity(size);
    let mut rhs = vec![Rational::zero(); size];

    let mut row0 = moment_row(0, dw);
    row0.extend(vec![Rational::zero(); sw]);
    matrix.push(row0);

    let mut row1 = moment_row(2, dw);
    row1.extend(vec![Rational::zero(); sw]);
    matrix.push(row1);
    rhs[1] = Rational::from_int(-1);

    for k in 1..=(l + m + 1) as u32 {
        let mut row = moment_row(2 * k, dw);
        let factor = Rational::from_int((2 * k * (2 * k - 1)) as i64);
        row.extend(
            moment_row(2 * k - 2, sw)
                .into_iter()
                .map(|v| v * factor.clone()),
        );
        matrix.push(row);
    }

    let sol = solve_dense(matrix, rhs).ok_or(Error::SingularWeightSystem { l, m })?;
    let d = SymmetricFormula::new(sol[..dw].to_vec());
    let s = SymmetricFormula::new(sol[dw..].to_vec());
    Ok(checked_scheme(d, s, l, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::sturm::has_no_root_in;

    #[test]
    fn c_series_small_orders() {
        assert_eq!(c_series(0).coeffs(), &[ratio(1, 1)]);
        assert_eq!(
            c_series(2).coeffs(),
            &[ratio(1, 1), ratio(1, 12), ratio(1, 90)]
        );
    }

    #[test]
    fn c_series_hypergeometric_ratio() {
        // c_{t+1}/c_t = (t+1)^2 / (4 (t + 3/2)(t + 2)): the coefficients are
        // those of a generalized hypergeometric series.
        let c = c_series(21);
        for t in 0..=20u32 {
            let lhs = c.coeff(t as usize + 1) / c.coeff(t as usize);
            let t_r = Rational::from_int(t as i64);
            let rhs = (t_r.clone() + ratio(1, 1)).int_pow(2)
                / (ratio(4, 1) * (t_r.clone() + ratio(3, 2)) * (t_r + ratio(2, 1)));
            assert_eq!(lhs, rhs, "t = {t}");
        }
    }

    #[test]
    fn trivial_and_small_approximants() {
        let p00 = approximant(0, 0).unwrap();
        assert_eq!(p00.numerator, RationalPolynomial::one());
        assert_eq!(p00.denominator, RationalPolynomial::one());

        let p01 = approximant(0, 1).unwrap();
        assert_eq!(p01.numerator, RationalPolynomial::one());
        assert_eq!(
            p01.denominator.coeffs(),
            &[ratio(1, 1), ratio(-1, 12)]
        );

        // m = 0: the approximant is the truncated series itself.
        let p10 = approximant(1, 0).unwrap();
        assert_eq!(p10.numerator.coeffs(), &[ratio(1, 1), ratio(1, 12)]);
        assert_eq!(p10.denominator, RationalPolynomial::one());
    }

    #[test]
    fn defect_valuation_is_exact() {
        for (l, m) in [(0usize, 0usize), (1, 1), (2, 1), (1, 3), (3, 2)] {
            let p = approximant(l, m).unwrap();
            assert_eq!(p.defect_valuation(), Some(l + m + 1), "({l},{m})");
        }
    }

    #[test]
    fn classical_schemes_recovered() {
        let s00 = optimal_scheme(0, 0).unwrap();
        assert_eq!(s00.d, SymmetricFormula::base_stencil());
        assert_eq!(s00.s, SymmetricFormula::singleton(ratio(1, 1)));
        assert_eq!(s00.order, 2);

        let s01 = optimal_scheme(0, 1).unwrap();
        assert_eq!(s01.d, SymmetricFormula::base_stencil());
        assert_eq!(s01.s.half_coeffs(), &[ratio(5, 6), ratio(1, 12)]);
        assert_eq!(s01.order, 4);
    }

    #[test]
    fn tenth_order_scheme() {
        let s22 = optimal_scheme(2, 2).unwrap();
        assert_eq!(s22.order, 10);
        assert_eq!(
            exact_order(&s22.d, &s22.s, 16),
            ConsistencyOrder::Exact(10)
        );
    }

    #[test]
    fn direct_route_agrees() {
        for (l, m) in [(0usize, 1usize), (1, 1), (3, 2), (0, 0), (2, 0)] {
            let a = optimal_scheme(l, m).unwrap();
            let b = optimal_scheme_direct(l, m).unwrap();
            assert_eq!(a.d, b.d, "({l},{m})");
            assert_eq!(a.s, b.s, "({l},{m})");
        }
    }

    #[test]
    fn numerator_roots_stay_clear_of_spectrum() {
        // Small cases here; the acceptance suite covers l + m <= 8.
        for (l, m) in [(1usize, 0usize), (1, 1), (2, 1), (0, 1), (2, 2)] {
            let p = approximant(l, m).unwrap();
            assert!(
                has_no_root_in(&p.numerator, &ratio(0, 1), &ratio(4, 1)),
                "R_{{{l},{m}}}"
            );
            assert!(
                has_no_root_in(&p.denominator, &ratio(0, 1), &ratio(4, 1)),
                "Q_{{{l},{m}}}"
            );
        }
    }

    #[test]
    fn taylor_column_has_positive_coefficients() {
        for k in 0..=6 {
            let p = approximant(k, 0).unwrap();
            assert!(p
                .numerator
                .coeffs()
                .iter()
                .all(|c| c > &Rational::zero()));
        }
    }
}
