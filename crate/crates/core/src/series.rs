//! Truncated formal power series over the rationals.
//!
//! A value stores coefficients of `X^0..X^K`; binary operations truncate to
//! the smaller of the two truncation orders.

use num_traits::Zero;

use crate::poly::RationalPolynomial;
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>, // length K+1
}

impl TruncatedSeries {
    /// From coefficients of `X^0..X^K`; the length fixes `K`, zeros included.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the X^0 term");
        TruncatedSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn from_polynomial(p: &RationalPolynomial, order: usize) -> Self {
        TruncatedSeries {
            coeffs: (0..=order).map(|k| p.coeff(k)).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        TruncatedSeries {
            coeffs: (0..=order.min(self.order())).map(|k| self.coeff(k)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        TruncatedSeries {
            coeffs: (0..=k).map(|i| self.coeff(i) + other.coeff(i)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        TruncatedSeries {
            coeffs: (0..=k).map(|i| self.coeff(i) - other.coeff(i)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        let mut out = vec![Rational::zero(); k + 1];
        for i in 0..=k.min(self.order()) {
            if self.coeff(i).is_zero() {
                continue;
            }
            for j in 0..=(k - i).min(other.order()) {
                out[i + j] += self.coeff(i) * other.coeff(j);
            }
        }
        TruncatedSeries { coeffs: out }
    }

    pub fn scale(&self, v: &Rational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c * v).collect(),
        }
    }

    /// Index of the first nonzero coefficient; `None` when zero to order `K`.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }
}
