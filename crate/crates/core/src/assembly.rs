//! Assembly of the finite-dimensional operators: the square difference matrix
//! acting on interior values (with its odd-extension boundary closure) and
//! the rectangular source action.
//!
//! The closure convention is fixed once and for all: interior vectors are
//! extended to sequences that are odd about `0` and about `N+1` (period
//! `2N+2`) and then convolved. For `N >= 2 tau(d)` this is the familiar
//! Toeplitz band minus antidiagonal corner blocks `d_{i+j}`, and all corner
//! entries fall inside the band.

use std::ops::RangeInclusive;

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::consistency::{boundary_corrections, exact_order, interior_weights};
use crate::error::{Error, Result};
use crate::formula::SymmetricFormula;
use crate::scalar::{Rational, Scalar};

/// Uniform grid with `N` interior points; `h = 1/(N+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "grid needs at least one interior point");
        Grid { n }
    }

    pub fn interior_points(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n as f64 + 1.0)
    }

    /// Exact stepsize; `h * (N+1) = 1` holds identically here.
    pub fn h_rational(&self) -> Rational {
        Rational::new(1.into(), (self.n as i64 + 1).into())
    }

    pub fn x(&self, j: i64) -> f64 {
        j as f64 * self.h()
    }
}

/// Componentwise samples `g(x_j)` over an index range (which may reach
/// outside `[0,1]`; the source side of wide schemes needs a few such values).
pub fn sample_grid(
    g: &dyn Fn(f64) -> f64,
    grid: &Grid,
    range: RangeInclusive<i64>,
) -> Vec<f64> {
    range.map(|j| g(grid.x(j))).collect()
}

/// Source term sampler: a callable plus the bookkeeping for which grid
/// indices the assembled source action actually reads.
pub struct SourceSampler<'a> {
    f: &'a dyn Fn(f64) -> f64,
}

impl<'a> SourceSampler<'a> {
    pub fn new(f: &'a dyn Fn(f64) -> f64) -> Self {
        SourceSampler { f }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

/// A complete discretization: interior pair `(d, s)`, boundary corrections
/// `b^1..b^{tau(d)}`, interior order `n` and boundary order `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme<S: Scalar> {
    pub d: SymmetricFormula<S>,
    pub s: SymmetricFormula<S>,
    pub boundary: Vec<SymmetricFormula<S>>,
    pub interior_order: u32,
    pub boundary_order: u32,
}

/// Boundary order relative to the interior order `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuMode {
    /// `mu = n`
    Full,
    /// `mu = n - 2`
    Reduced,
}

impl MuMode {
    pub fn mu(&self, n: u32) -> u32 {
        match self {
            MuMode::Full => n,
            MuMode::Reduced => n - 2,
        }
    }
}

impl Scheme<Rational> {
    /// Validating constructor: `(d, s)` must be consistent of order `>= n`,
    /// `mu` must be `n` or `n-2`, and the corrections must be those of `d`.
    pub fn from_parts(
        d: SymmetricFormula<Rational>,
        s: SymmetricFormula<Rational>,
        boundary: Vec<SymmetricFormula<Rational>>,
        interior_order: u32,
        boundary_order: u32,
    ) -> Result<Self> {
        if interior_order == 0 || interior_order % 2 != 0 {
            return Err(Error::OddOrder(interior_order));
        }
        if boundary_order != interior_order && boundary_order + 2 != interior_order {
            return Err(Error::OddBoundaryOrder(boundary_order));
        }
        assert!(
            exact_order(&d, &s, interior_order + 2).is_at_least(interior_order),
            "interior pair misses its declared order"
        );
        let tau = d.radius().unwrap_or(0);
        assert_eq!(boundary.len(), tau, "one correction per boundary row");
        let width = (boundary_order / 2).saturating_sub(1) as usize;
        for b in &boundary {
            assert!(b.radius().map_or(0, |r| r) <= width, "correction too wide");
        }
        Ok(Scheme {
            d,
            s,
            boundary,
            interior_order,
            boundary_order,
        })
    }

    /// Standard construction from a zero-mean formula: interior weights of
    /// order `n` by the moment system, corrections of order `mu`.
    pub fn from_formula(d: SymmetricFormula<Rational>, n: u32, mu_mode: MuMode) -> Result<Self> {
        let s = interior_weights(&d, n)?;
        let mu = mu_mode.mu(n);
        let boundary = boundary_corrections(&d, mu)?;
        Scheme::from_parts(d, s, boundary, n, mu)
    }

    pub fn to_f64(&self) -> Scheme<f64> {
        Scheme {
            d: self.d.to_f64(),
            s: self.s.to_f64(),
            boundary: self.boundary.iter().map(|b| b.to_f64()).collect(),
            interior_order: self.interior_order,
            boundary_order: self.boundary_order,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.interior_order,
            "mu": self.boundary_order,
            "d": self.d.to_json(),
            "s": self.s.to_json(),
            "boundary": self.boundary.iter().map(|b| b.to_json()).collect::<Vec<_>>(),
        })
    }
}

impl<S: Scalar> Scheme<S> {
    /// Grid indices the source action reads for `N` interior points.
    pub fn sample_window(&self, n: usize) -> RangeInclusive<i64> {
        let ts = self.s.radius().unwrap_or(0) as i64;
        let tb = self
            .boundary
            .iter()
            .map(|b| b.radius().unwrap_or(0))
            .max()
            .unwrap_or(0) as i64;
        let lo = (1 - ts).min(-tb);
        let hi = (n as i64 + ts).max(n as i64 + 1 + tb);
        lo..=hi
    }
}

/// Square band matrix with equal lower/upper bandwidth, row-major band
/// storage. Corner closures of difference matrices land inside the band, so
/// no extra blocks are needed.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<S: Scalar> {
    size: usize,
    bandwidth: usize,
    data: Vec<S>, // size rows of (2*bandwidth + 1) entries
}

impl<S: Scalar> BandedMatrix<S> {
    pub fn zeros(size: usize, bandwidth: usize) -> Self {
        assert!(size >= 1);
        let bandwidth = bandwidth.min(size - 1);
        BandedMatrix {
            size,
            bandwidth,
            data: vec![S::zero(); size * (2 * bandwidth + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Entry `(i, j)`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> S {
        let w = self.bandwidth as i64;
        let off = j as i64 - i as i64;
        if off.abs() > w {
            S::zero()
        } else {
            self.data[i * (2 * self.bandwidth + 1) + (off + w) as usize].clone()
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        let w = self.bandwidth as i64;
        let off = j as i64 - i as i64;
        assert!(off.abs() <= w, "entry ({i},{j}) outside bandwidth {w}");
        self.data[i * (2 * self.bandwidth + 1) + (off + w) as usize] = v;
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.size);
        let w = self.bandwidth;
        (0..self.size)
            .map(|i| {
                let lo = i.saturating_sub(w);
                let hi = (i + w).min(self.size - 1);
                let mut acc = S::zero();
                for j in lo..=hi {
                    acc = acc + self.get(i, j) * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let w = self.bandwidth;
        for i in 0..self.size {
            for j in (i + 1)..(i + w + 1).min(self.size) {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

impl BandedMatrix<f64> {
    /// Coordinate-format text export (1-based indices, nonzeros only).
    pub fn to_matrix_market(&self) -> String {
        let mut entries = Vec::new();
        for i in 0..self.size {
            for j in i.saturating_sub(self.bandwidth)..=(i + self.bandwidth).min(self.size - 1) {
                let v = self.get(i, j);
                if v != 0.0 {
                    entries.push((i + 1, j + 1, v));
                }
            }
        }
        let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
        out.push_str(&format!("{} {} {}\n", self.size, self.size, entries.len()));
        for (i, j, v) in entries {
            out.push_str(&format!("{i} {j} {v:e}\n"));
        }
        out
    }
}

/// Apply the closed difference operator to an interior vector by odd
/// periodic extension and convolution. Agrees entrywise with
/// `difference_matrix(d, N) * v` for every `N`.
pub fn apply_difference<S: Scalar>(d: &SymmetricFormula<S>, v: &[S]) -> Vec<S> {
    let n = v.len();
    let period = 2 * (n as i64) + 2;
    let tau = match d.radius() {
        None => return vec![S::zero(); n],
        Some(t) => t as i64,
    };
    let extended = |m: i64| -> S {
        let m = m.rem_euclid(period);
        if m == 0 || m == n as i64 + 1 {
            S::zero()
        } else if m <= n as i64 {
            v[(m - 1) as usize].clone()
        } else {
            -v[(period - m - 1) as usize].clone()
        }
    };
    (1..=n as i64)
        .map(|i| {
            let mut acc = S::zero();
            for k in -tau..=tau {
                acc = acc + d.coeff(k.unsigned_abs() as usize) * extended(i - k);
            }
            acc
        })
        .collect()
}

/// Assemble the closed difference matrix for `N` interior points.
///
/// For `N >= 2 tau(d)` the band/corner formula applies directly:
/// `(i, j) -> d_{|i-j|} - d_{i+j} - d_{2N+2-i-j}` (1-based). For smaller `N`
/// the periodic images overlap, so the matrix is materialized column by
/// column from `apply_difference`.
pub fn difference_matrix<S: Scalar>(d: &SymmetricFormula<S>, n: usize) -> BandedMatrix<S> {
    let tau = match d.radius() {
        None => return BandedMatrix::zeros(n, 0),
        Some(t) => t,
    };
    if n >= 2 * tau {
        let mut m = BandedMatrix::zeros(n, tau);
        let coeff = |k: i64| -> S {
            if k >= 0 && (k as usize) <= tau {
                d.coeff(k as usize)
            } else {
                S::zero()
            }
        };
        for i in 1..=n as i64 {
            let lo = (i - tau as i64).max(1);
            let hi = (i + tau as i64).min(n as i64);
            for j in lo..=hi {
                let v = coeff((i - j).abs()) - coeff(i + j) - coeff(2 * (n as i64) + 2 - i - j);
                m.set((i - 1) as usize, (j - 1) as usize, v);
            }
        }
        m
    } else {
        let mut m = BandedMatrix::zeros(n, n - 1);
        for j in 0..n {
            let mut basis = vec![S::zero(); n];
            basis[j] = S::from_int(1);
            for (i, v) in apply_difference(d, &basis).into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }
}

/// Apply the source side: row `i` applies `s` centered at `x_i`, plus the
/// correction `b^i` centered at the nearer boundary for the first and last
/// `tau(d)` rows.
pub fn source_action(scheme: &Scheme<f64>, f: &dyn Fn(f64) -> f64, n: usize) -> Vec<f64> {
    let grid = Grid::new(n);
    let sampler = SourceSampler::new(f);
    let tau_d = scheme.d.radius().unwrap_or(0);
    let tau_s = scheme.s.radius().unwrap_or(0) as i64;
    let mut out = vec![0.0; n];
    for i in 1..=n as i64 {
        let mut acc = 0.0;
        for k in -tau_s..=tau_s {
            acc += scheme.s.coeff(k.unsigned_abs() as usize) * sampler.eval(grid.x(i + k));
        }
        out[(i - 1) as usize] = acc;
    }
    for i in 1..=tau_d.min(n) {
        let b = &scheme.boundary[i - 1];
        if let Some(tb) = b.radius() {
            let tb = tb as i64;
            // Left rows: correction centered at x = 0.
            let mut left = 0.0;
            // Right rows: correction centered at x = 1.
            let mut right = 0.0;
            for k in -tb..=tb {
                let w = b.coeff(k.unsigned_abs() as usize);
                left += w * sampler.eval(grid.x(k));
                right += w * sampler.eval(grid.x(n as i64 + 1 - k));
            }
            out[i - 1] += left;
            out[n - i] += right;
        }
    }
    out
}

/// Eigenvalues `P(4 sin^2(pi k h / 2))`, `k = 1..N`, of the closed matrix of
/// `P(a)`, evaluated with a float polynomial given by its coefficients.
pub fn eigenvalues_from_coeffs(coeffs: &[f64], n: usize) -> Vec<f64> {
    let h = 1.0 / (n as f64 + 1.0);
    (1..=n)
        .map(|k| {
            let s = (0.5 * std::f64::consts::PI * k as f64 * h).sin();
            let x = 4.0 * s * s;
            coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
        })
        .collect()
}

/// Float coefficient view of a rational formula's polynomial `P` with
/// `P(a) = d`; convenience for spectral diagnostics.
pub fn base_polynomial_f64(d: &SymmetricFormula<Rational>) -> Vec<f64> {
    d.to_base_polynomial()
        .coeffs()
        .iter()
        .map(|c| c.to_f64().expect("coefficient fits f64"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_traits::Zero;
    use proptest::prelude::*;

    type F = SymmetricFormula<Rational>;

    #[test]
    fn grid_relation_is_exact() {
        let g = Grid::new(7);
        assert_eq!(
            g.h_rational() * Rational::from_int(8),
            Rational::from_int(1)
        );
        assert!((g.h() * 8.0 - 1.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn sample_grid_quadratic() {
        let g = Grid::new(3);
        let u = |x: f64| x * (1.0 - x);
        assert_eq!(sample_grid(&u, &g, 1..=3), vec![3.0 / 16.0, 0.25, 3.0 / 16.0]);
        let z = |_: f64| 0.0;
        assert_eq!(sample_grid(&z, &g, -1..=5), vec![0.0; 7]);
    }

    #[test]
    fn tridiagonal_assembly() {
        let a = F::base_stencil();
        let m = difference_matrix(&a, 5);
        assert_eq!(m.bandwidth(), 1);
        for i in 0..5 {
            assert_eq!(m.get(i, i), ratio(2, 1));
            if i > 0 {
                assert_eq!(m.get(i, i - 1), ratio(-1, 1));
            }
        }
        assert!(m.is_symmetric());
    }

    #[test]
    fn squared_stencil_matches_squared_matrix() {
        let a = F::base_stencil();
        let sq = F::base_power(2);
        let n = 8;
        let m2 = difference_matrix(&sq, n);
        // Corner entry (1,1): 6 - 1 = 5.
        assert_eq!(m2.get(0, 0), ratio(5, 1));
        // Square the tridiagonal matrix densely as the oracle.
        let a_n = difference_matrix(&a, n).to_dense();
        let mut prod = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Rational::zero();
                for k in 0..n {
                    acc += a_n[i][k].clone() * a_n[k][j].clone();
                }
                prod[i][j] = acc;
            }
        }
        assert_eq!(m2.to_dense(), prod);
    }

    #[test]
    fn apply_matches_matrix_on_basis() {
        let a = F::base_stencil();
        let mut e1 = vec![Rational::zero(); 4];
        e1[0] = Rational::from_int(1);
        assert_eq!(
            apply_difference(&a, &e1),
            vec![
                ratio(2, 1),
                ratio(-1, 1),
                Rational::zero(),
                Rational::zero()
            ]
        );
    }

    #[test]
    fn small_n_fallback_agrees_with_convolution() {
        // tau = 3 but N = 4 < 2 tau: dense fallback path.
        let d = F::base_power(3);
        let n = 4;
        let m = difference_matrix(&d, n);
        for j in 0..n {
            let mut basis = vec![Rational::zero(); n];
            basis[j] = Rational::from_int(1);
            let col = apply_difference(&d, &basis);
            for i in 0..n {
                assert_eq!(m.get(i, j), col[i]);
            }
        }
        assert!(m.is_symmetric());
    }

    #[test]
    fn sine_vectors_are_eigenvectors() {
        // Rayleigh quotients of the applied operator reproduce the closed-form
        // eigenvalues to 1e-12 relative to the spectral radius.
        let d = F::base_power(2).to_f64();
        let p = [0.0, 0.0, 1.0]; // X^2
        let n = 33;
        let h = 1.0 / (n as f64 + 1.0);
        let eigs = eigenvalues_from_coeffs(&p, n);
        let radius = eigs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for k in 1..=n {
            let v: Vec<f64> = (1..=n)
                .map(|j| (std::f64::consts::PI * k as f64 * h * j as f64).sin())
                .collect();
            let dv = apply_difference(&d, &v);
            let num: f64 = dv.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            let den: f64 = v.iter().map(|b| b * b).sum();
            let rayleigh = num / den;
            assert!(
                (rayleigh - eigs[k - 1]).abs() <= 1e-12 * radius,
                "k={k}: {rayleigh} vs {}",
                eigs[k - 1]
            );
        }
    }

    #[test]
    fn source_action_pointwise_for_trivial_weights() {
        // s = 1_{0}, zero corrections: rows are plain samples f(x_i).
        let d = F::base_stencil();
        let scheme = Scheme::from_formula(d, 2, MuMode::Full)
            .unwrap()
            .to_f64();
        let f = |x: f64| x.cos();
        let n = 6;
        let grid = Grid::new(n);
        let out = source_action(&scheme, &f, n);
        for i in 1..=n {
            assert_eq!(out[i - 1], grid.x(i as i64).cos());
        }
    }

    #[test]
    fn numerov_row_sums_on_constant_source() {
        // f == 1: every interior row sums to s_0 + 2 s_1 = 1; boundary rows
        // add the correction mass (zero for tau(d) = 1).
        let scheme = Scheme::from_formula(F::base_stencil(), 4, MuMode::Full)
            .unwrap()
            .to_f64();
        let n = 9;
        let out = source_action(&scheme, &|_| 1.0, n);
        for v in out {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn scheme_window_covers_outside_samples() {
        let scheme = Scheme::from_formula(F::base_stencil(), 4, MuMode::Full).unwrap();
        let w = scheme.sample_window(10);
        assert!(*w.start() <= 0 && *w.end() >= 11);
    }

    #[test]
    fn matrix_market_export_shape() {
        let m = difference_matrix(&F::base_stencil().to_f64(), 3);
        let text = m.to_matrix_market();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("%%MatrixMarket"));
        assert_eq!(lines.next().unwrap(), "3 3 7");
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-5i64..=5, 1i64..=3).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        // The convolution route and the assembled matrix agree exactly.
        #[test]
        fn apply_equals_matrix(
            coeffs in prop::collection::vec(small_rational(), 1..6),
            v in prop::collection::vec(small_rational(), 2..33),
        ) {
            let d = F::new(coeffs);
            let n = v.len();
            let m = difference_matrix(&d, n);
            prop_assert_eq!(apply_difference(&d, &v), m.matvec(&v));
        }

        // Assembling P(a) equals evaluating P at the assembled base matrix.
        #[test]
        fn polynomial_identity(
            pc in prop::collection::vec(small_rational(), 1..6),
            n in 10usize..32,
        ) {
            let p = crate::poly::RationalPolynomial::new(pc);
            let d = F::from_base_polynomial(p.coeffs());
            let lhs = difference_matrix(&d, n).to_dense();

            let a_n = difference_matrix(&F::base_stencil(), n).to_dense();
            // Horner: acc = acc * A + c I, densely.
            let mut acc = vec![vec![Rational::zero(); n]; n];
            for c in p.coeffs().iter().rev() {
                let mut next = vec![vec![Rational::zero(); n]; n];
                for i in 0..n {
                    for j in 0..n {
                        let mut s = Rational::zero();
                        for k in 0..n {
                            if !acc[i][k].is_zero() {
                                s += acc[i][k].clone() * a_n[k][j].clone();
                            }
                        }
                        next[i][j] = s;
                    }
                    next[i][i] += c.clone();
                }
                acc = next;
            }
            prop_assert_eq!(lhs, acc);
        }

        #[test]
        fn real_difference_matrices_are_symmetric(
            coeffs in prop::collection::vec(small_rational(), 1..6),
            n in 2usize..24,
        ) {
            let d = F::new(coeffs);
            prop_assert!(difference_matrix(&d, n).is_symmetric());
        }
    }
}
