//! Desk-scale experiments: manufactured-solution convergence studies,
//! quasi-resonance comparisons, random-formula stability sampling and the
//! quadratic-irrational stability demo, with CSV/plot-script emission.

use num_traits::{FromPrimitive, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::assembly::{difference_matrix, sample_grid, source_action, Grid, MuMode, Scheme};
use crate::error::{Error, Result};
use crate::formula::SymmetricFormula;
use crate::poly::RationalPolynomial;
use crate::scalar::{FieldScalar, Rational, Scalar};
use crate::dd::Dd;
use crate::solver::{
    inverse_sup_norm, min_abs_eigenvalue, relative_stability_probe, solve_banded,
    RelativeStabilityReport, RESONANT_EIG_THRESHOLD,
};
use crate::sturm::{count_roots_closed, has_no_root_in};

/// A manufactured Dirichlet pair: analytic `u` with `u(0) = u(1) = 0` and the
/// matching source `f = -u''`, both defined on a neighborhood of `[0,1]`.
#[derive(Clone, Copy)]
pub struct ManufacturedProblem {
    pub name: &'static str,
    pub u: fn(f64) -> f64,
    pub f: fn(f64) -> f64,
}

fn u_quadratic(x: f64) -> f64 {
    x * (1.0 - x)
}
fn f_quadratic(_: f64) -> f64 {
    2.0
}

fn u_sine(x: f64) -> f64 {
    (std::f64::consts::PI * x).sin()
}
fn f_sine(x: f64) -> f64 {
    std::f64::consts::PI.powi(2) * (std::f64::consts::PI * x).sin()
}

fn u_exp2x(x: f64) -> f64 {
    x * (1.0 - x) * (2.0 * x).exp()
}
fn f_exp2x(x: f64) -> f64 {
    (4.0 * x * x + 4.0 * x - 2.0) * (2.0 * x).exp()
}

fn u_cosine41(x: f64) -> f64 {
    x * (1.0 - x) * (4.0 * (41.0 * x).cos()).exp()
}
fn f_cosine41(x: f64) -> f64 {
    // u = g E with g = x - x^2, E = exp(4 cos(41 x)):
    // E' = -164 sin(41x) E,
    // E'' = (-6724 cos(41x) + 26896 sin^2(41x)) E.
    let s = (41.0 * x).sin();
    let c = (41.0 * x).cos();
    let e = (4.0 * c).exp();
    let g = x - x * x;
    let gp = 1.0 - 2.0 * x;
    let upp = (-2.0 + 2.0 * gp * (-164.0 * s) + g * (-6724.0 * c + 26896.0 * s * s)) * e;
    -upp
}

pub const PROBLEMS: &[ManufacturedProblem] = &[
    ManufacturedProblem {
        name: "quadratic",
        u: u_quadratic,
        f: f_quadratic,
    },
    ManufacturedProblem {
        name: "sine",
        u: u_sine,
        f: f_sine,
    },
    ManufacturedProblem {
        name: "exp2x",
        u: u_exp2x,
        f: f_exp2x,
    },
    ManufacturedProblem {
        name: "cosine41",
        u: u_cosine41,
        f: f_cosine41,
    },
];

pub fn problem(name: &str) -> Result<&'static ManufacturedProblem> {
    PROBLEMS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownProblem(name.to_string()))
}

impl ManufacturedProblem {
    /// Boundary values must vanish and `f` must match `-u''` by a central
    /// second difference at interior spot-check points.
    pub fn validate(&self) -> bool {
        let u = self.u;
        let f = self.f;
        if u(0.0).abs() > 1e-15 || u(1.0).abs() > 1e-15 {
            return false;
        }
        let delta = 1e-5;
        let points: Vec<f64> = (0..11).map(|i| (i as f64 + 0.5) / 11.0).collect();
        // Common scale: pointwise relative error is meaningless near zeros
        // of an oscillatory f.
        let scale = points
            .iter()
            .map(|&x| f(x).abs())
            .fold(1.0f64, f64::max);
        for &x in &points {
            let second = (u(x - delta) - 2.0 * u(x) + u(x + delta)) / (delta * delta);
            if (second + f(x)).abs() > 1e-6 * scale {
                return false;
            }
        }
        true
    }
}

/// Why a row is excluded from the slope fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFlag {
    Ok,
    /// Eigenvalue gap below `RESONANT_EIG_THRESHOLD`.
    Resonant,
    /// Error at the double-precision floor (below `100 eps ||u||_inf`).
    Floor,
}

impl RowFlag {
    pub fn label(&self) -> &'static str {
        match self {
            RowFlag::Ok => "ok",
            RowFlag::Resonant => "resonant",
            RowFlag::Floor => "floor",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub error: f64,
    pub min_abs_eig: f64,
    pub flag: RowFlag,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// `(slope, 1 - R^2)` of the log-log fit over `Ok` rows; `None` when
    /// fewer than three rows are usable.
    pub fit: Option<(f64, f64)>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,h,E_N,min_abs_eig,flag\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                r.h,
                r.error,
                r.min_abs_eig,
                r.flag.label()
            ));
        }
        out
    }
}

/// Least-squares slope of `log E` against `log h` and the fit residual
/// `1 - R^2`. Needs at least three rows.
pub fn fit_order(rows: &[(f64, f64)]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(h, e)| *h > 0.0 && e.is_finite() && *e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewRows(pts.len()));
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let residual = if ss_tot <= f64::MIN_POSITIVE {
        if ss_res <= f64::MIN_POSITIVE {
            0.0
        } else {
            1.0
        }
    } else {
        ss_res / ss_tot
    };
    Ok((slope, residual))
}

/// Solve one manufactured problem with one scheme at one resolution.
/// Returns `(error, min_abs_eig)`; the error is `inf` if the matrix is
/// numerically singular.
///
/// The operator is assembled and factored in double-double so the measured
/// error is discretization error all the way down to the f64 sampling floor;
/// source and solution samples stay plain f64.
pub fn solve_once(
    scheme: &Scheme<Rational>,
    prob: &ManufacturedProblem,
    n: usize,
) -> (f64, f64) {
    let fs = scheme.to_f64();
    let grid = Grid::new(n);
    let coeffs = fs.d.to_base_polynomial_f64();
    let min_eig = min_abs_eigenvalue(&coeffs, n);
    let matrix = difference_matrix(&scheme.d.to_dd(), n);
    let h2 = Dd::from_f64(1.0) / Dd::from_f64(((n + 1) * (n + 1)) as f64);
    let rhs: Vec<Dd> = source_action(&fs, &prob.f, n)
        .into_iter()
        .map(|v| Dd::from_f64(v) * h2)
        .collect();
    let u_ex = sample_grid(&prob.u, &grid, 1..=n as i64);
    match solve_banded(&matrix, &rhs) {
        Err(_) => (f64::INFINITY, min_eig),
        Ok(sol) => {
            let err = sol
                .solution
                .iter()
                .zip(u_ex.iter())
                .map(|(a, b)| (a.to_f64() - b).abs())
                .fold(0.0, f64::max);
            (err, min_eig)
        }
    }
}

/// Run a convergence study: solve at every `N`, flag resonant and
/// floor-level rows, fit the usable ones.
pub fn run_convergence(
    scheme: &Scheme<Rational>,
    prob: &ManufacturedProblem,
    ns: &[usize],
) -> ConvergenceReport {
    let rows: Vec<ConvergenceRow> = ns
        .iter()
        .map(|&n| {
            let grid = Grid::new(n);
            let (error, min_abs_eig) = solve_once(scheme, prob, n);
            let sup_u = (1..=n as i64)
                .map(|j| (prob.u)(grid.x(j)).abs())
                .fold(0.0, f64::max);
            let flag = if min_abs_eig < RESONANT_EIG_THRESHOLD {
                RowFlag::Resonant
            } else if error < 100.0 * f64::EPSILON * sup_u {
                RowFlag::Floor
            } else {
                RowFlag::Ok
            };
            ConvergenceRow {
                n,
                h: grid.h(),
                error,
                min_abs_eig,
                flag,
            }
        })
        .collect();
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.flag == RowFlag::Ok)
        .map(|r| (r.h, r.error))
        .collect();
    let fit = fit_order(&usable).ok();
    ConvergenceReport { rows, fit }
}

/// The one-parameter family `(2-6z) 1_{0} + (4z-1) 1_{±1} - z 1_{±2}`,
/// i.e. `(X - z X^2)(a)`; `z = 0` is the base stencil.
pub fn resonance_formula(z: &Rational) -> SymmetricFormula<Rational> {
    let p = RationalPolynomial::new(vec![
        Rational::from_int(0),
        Rational::from_int(1),
        -z.clone(),
    ]);
    SymmetricFormula::from_base_polynomial(p.coeffs())
}

#[derive(Debug, Clone)]
pub struct ResonanceReport {
    pub baseline: ConvergenceReport,
    pub resonant: ConvergenceReport,
}

impl ResonanceReport {
    /// Long-format CSV with both runs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scheme,N,h,E_N,min_abs_eig,flag\n");
        for (label, rep) in [("baseline", &self.baseline), ("resonant", &self.resonant)] {
            for r in &rep.rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    label,
                    r.n,
                    r.h,
                    r.error,
                    r.min_abs_eig,
                    r.flag.label()
                ));
            }
        }
        out
    }
}

/// Compare the base stencil against the quasi-resonant `z` formula at the
/// same interior order, on the same problem and resolutions.
pub fn run_resonance(
    z: &Rational,
    order: u32,
    prob: &ManufacturedProblem,
    ns: &[usize],
) -> Result<ResonanceReport> {
    let baseline = Scheme::from_formula(SymmetricFormula::base_stencil(), order, MuMode::Full)?;
    let resonant = Scheme::from_formula(resonance_formula(z), order, MuMode::Full)?;
    Ok(ResonanceReport {
        baseline: run_convergence(&baseline, prob, ns),
        resonant: run_convergence(&resonant, prob, ns),
    })
}

/// Which coefficient field random formulas are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

impl std::str::FromStr for Field {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(format!("unknown field `{other}` (use real|complex)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomSampleRecord {
    pub index: usize,
    /// Exact flag: the sampled numerator polynomial has a real root in the
    /// spectral interval ((0,4] for real samples, [0,4] for complex ones).
    pub root_in_interval: bool,
    pub min_abs_eig: f64,
    pub h2_inv_norm_first: f64,
    pub h2_inv_norm_last: f64,
    /// max/min of `h^2 ||D^{-1}||_inf` over the sweep (the growth trend).
    pub h2_inv_norm_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct RandomStabilityReport {
    pub field: Field,
    pub l: usize,
    pub seed: u64,
    pub records: Vec<RandomSampleRecord>,
    pub root_count: usize,
}

impl RandomStabilityReport {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("sample,root_in_interval,min_abs_eig,h2_inv_norm_first,h2_inv_norm_last,h2_inv_norm_ratio\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.index,
                if r.root_in_interval { 1 } else { 0 },
                r.min_abs_eig,
                r.h2_inv_norm_first,
                r.h2_inv_norm_last,
                r.h2_inv_norm_ratio
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "field={:?} l={} samples={} seed={} root_in_interval_count={} fraction={}",
            self.field,
            self.l,
            self.records.len(),
            self.seed,
            self.root_count,
            self.root_count as f64 / self.records.len().max(1) as f64
        )
    }
}

/// Exact root flag for a float polynomial: rationalize the (dyadic) f64
/// coefficients and count real roots with Sturm sequences.
fn real_poly_has_root_in_0_4(coeffs: &[f64]) -> bool {
    let rat: Vec<Rational> = coeffs
        .iter()
        .map(|&c| Rational::from_f64(c).expect("finite coefficient"))
        .collect();
    let p = RationalPolynomial::new(rat);
    if p.is_zero() {
        return true;
    }
    // Roots in (0, 4]: closed count minus an exact root at zero.
    let closed = count_roots_closed(&p, &Rational::from_int(0), &Rational::from_int(4));
    let at_zero = usize::from(p.eval(&Rational::from_int(0)).is_zero());
    closed > at_zero
}

/// A complex polynomial vanishes at a real point iff its real and imaginary
/// parts share that root, i.e. iff their gcd has a root there.
fn complex_poly_has_root_in_0_4(re: &[f64], im: &[f64]) -> bool {
    let to_poly = |c: &[f64]| {
        RationalPolynomial::new(
            c.iter()
                .map(|&x| Rational::from_f64(x).expect("finite coefficient"))
                .collect(),
        )
    };
    let pr = to_poly(re);
    let pi = to_poly(im);
    if pr.is_zero() && pi.is_zero() {
        return true;
    }
    let g = pr.gcd(&pi);
    match g.degree() {
        None => {
            // gcd convention: zero only if both are zero (handled above);
            // here one polynomial is zero, so check the other directly.
            let nz = if pr.is_zero() { &pi } else { &pr };
            !has_no_root_in(nz, &Rational::from_int(0), &Rational::from_int(4))
        }
        Some(0) => false,
        Some(_) => !has_no_root_in(&g, &Rational::from_int(0), &Rational::from_int(4)),
    }
}

fn sample_record<S: FieldScalar>(
    index: usize,
    root_in_interval: bool,
    coeffs: &[S],
    d: &SymmetricFormula<S>,
    ns: &[usize],
) -> RandomSampleRecord {
    let mut min_eig = f64::INFINITY;
    let mut norms = Vec::with_capacity(ns.len());
    for &n in ns {
        min_eig = min_eig.min(min_abs_eigenvalue(coeffs, n));
        let h = 1.0 / (n as f64 + 1.0);
        let norm = inverse_sup_norm(&difference_matrix(d, n))
            .map(|v| h * h * v)
            .unwrap_or(f64::INFINITY);
        norms.push(norm);
    }
    let lo = norms.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let hi = norms.iter().fold(0.0f64, |a, &b| a.max(b));
    RandomSampleRecord {
        index,
        root_in_interval,
        min_abs_eig: min_eig,
        h2_inv_norm_first: *norms.first().unwrap_or(&f64::NAN),
        h2_inv_norm_last: *norms.last().unwrap_or(&f64::NAN),
        h2_inv_norm_ratio: hi / lo,
    }
}

/// Monte-Carlo stability study over random zero-mean formulas with
/// `tau(d) <= l+1`; deterministic for a fixed seed.
pub fn run_random_stability(
    l: usize,
    field: Field,
    samples: usize,
    seed: u64,
    ns: &[usize],
) -> RandomStabilityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(samples);
    for index in 0..samples {
        let record = match field {
            Field::Real => {
                let (r, d) = crate::solver::random::real_formula(l, &mut rng);
                let flag = real_poly_has_root_in_0_4(&r);
                let coeffs: Vec<f64> = std::iter::once(0.0).chain(r.iter().copied()).collect();
                sample_record(index, flag, &coeffs, &d, ns)
            }
            Field::Complex => {
                let (r, d) = crate::solver::random::complex_formula(l, &mut rng);
                let re: Vec<f64> = r.iter().map(|c| c.re).collect();
                let im: Vec<f64> = r.iter().map(|c| c.im).collect();
                let flag = complex_poly_has_root_in_0_4(&re, &im);
                let coeffs: Vec<num_complex::Complex64> =
                    std::iter::once(num_complex::Complex64::ZERO)
                        .chain(r.iter().copied())
                        .collect();
                sample_record(index, flag, &coeffs, &d, ns)
            }
        };
        records.push(record);
    }
    let root_count = records.iter().filter(|r| r.root_in_interval).count();
    RandomStabilityReport {
        field,
        l,
        seed,
        records,
        root_count,
    }
}

/// `(p + q sqrt(r)) / s` with integer entries; `validate` enforces that the
/// value is a genuine quadratic irrational.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticIrrational {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
}

impl QuadraticIrrational {
    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Result<Self> {
        let spec = format!("({p}+{q}*sqrt({r}))/{s}");
        if s == 0 {
            return Err(Error::NotQuadraticIrrational(spec, "zero denominator".into()));
        }
        if q == 0 {
            return Err(Error::NotQuadraticIrrational(spec, "rational value".into()));
        }
        if r < 2 {
            return Err(Error::NotQuadraticIrrational(spec, "radicand below 2".into()));
        }
        let root = (r as f64).sqrt().round() as i64;
        if root * root == r {
            return Err(Error::NotQuadraticIrrational(
                spec,
                "radicand is a perfect square".into(),
            ));
        }
        Ok(QuadraticIrrational { p, q, r, s })
    }

    /// Parse the comma form `p,q,r,s`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<_> = text.split(',').map(str::trim).collect();
        let bad = |why: &str| Error::NotQuadraticIrrational(text.to_string(), why.into());
        if parts.len() != 4 {
            return Err(bad("expected `p,q,r,s` for (p + q*sqrt(r))/s"));
        }
        let nums: Vec<i64> = parts
            .iter()
            .map(|p| p.parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(&e.to_string()))?;
        Self::new(nums[0], nums[1], nums[2], nums[3])
    }

    pub fn value(&self) -> f64 {
        (self.p as f64 + self.q as f64 * (self.r as f64).sqrt()) / self.s as f64
    }
}

#[derive(Debug, Clone)]
pub struct LiouvilleReport {
    pub alpha: QuadraticIrrational,
    /// The engineered interior root `4 sin^2(pi alpha / 2)`.
    pub lambda: f64,
    pub relative: RelativeStabilityReport,
}

impl LiouvilleReport {
    pub fn summary(&self) -> String {
        format!(
            "alpha=({}+{}*sqrt({}))/{} lambda={} inf_c={}",
            self.alpha.p,
            self.alpha.q,
            self.alpha.r,
            self.alpha.s,
            self.lambda,
            self.relative.infimum
        )
    }
}

/// Stability demo for `P = X (X - 4 sin^2(pi alpha / 2))` with a quadratic
/// irrational `alpha`: probes the plain `h^{-2}`-relative bound over the
/// sweep. Badly approximable roots keep the constant away from zero.
pub fn run_liouville(alpha: QuadraticIrrational, ns: &[usize]) -> LiouvilleReport {
    let lambda = 4.0 * (0.5 * std::f64::consts::PI * alpha.value()).sin().powi(2);
    let coeffs = vec![0.0, -lambda, 1.0];
    let d = SymmetricFormula::<f64>::from_base_polynomial(&coeffs);
    let relative = relative_stability_probe(&coeffs, &d, ns, |n| {
        let h = 1.0 / (n as f64 + 1.0);
        1.0 / (h * h)
    });
    LiouvilleReport {
        alpha,
        lambda,
        relative,
    }
}

/// Gnuplot script for a convergence CSV (log-log axes).
pub fn convergence_plot_script(csv_name: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set logscale xy\n\
         set xlabel 'h'\n\
         set ylabel 'E_N'\n\
         set key left top\n\
         plot '{csv_name}' using 2:3 skip 1 with linespoints title 'E_N'\n"
    )
}

/// Gnuplot script for the two-run resonance CSV.
pub fn resonance_plot_script(csv_name: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set logscale xy\n\
         set xlabel 'h'\n\
         set ylabel 'E_N'\n\
         set key left top\n\
         plot '{csv_name}' using 3:($1 eq 'baseline' ? $4 : 1/0) skip 1 with linespoints title 'baseline', \\\n\
              '{csv_name}' using 3:($1 eq 'resonant' ? $4 : 1/0) skip 1 with linespoints title 'resonant'\n"
    )
}

/// Convenience: float coefficients of the polynomial of a rational formula.
pub trait BasePolynomialF64 {
    fn to_base_polynomial_f64(&self) -> Vec<f64>;
}

impl BasePolynomialF64 for SymmetricFormula<f64> {
    fn to_base_polynomial_f64(&self) -> Vec<f64> {
        // Same peeling as the exact version, in floats (safe for the small
        // radii used here).
        let t = match self.radius() {
            None => return Vec::new(),
            Some(t) => t,
        };
        let a = SymmetricFormula::<f64>::base_stencil();
        let mut powers = vec![SymmetricFormula::<f64>::singleton(1.0)];
        for k in 1..=t {
            let next = powers[k - 1].convolve(&a);
            powers.push(next);
        }
        let mut work = self.clone();
        let mut coeffs = vec![0.0; t + 1];
        for k in (0..=t).rev() {
            let lead = work.coeff(k);
            let pk = if k % 2 == 0 { lead } else { -lead };
            work = work.sub(&powers[k].scale(&pk));
            coeffs[k] = pk;
        }
        coeffs
    }
}

impl BasePolynomialF64 for SymmetricFormula<Rational> {
    fn to_base_polynomial_f64(&self) -> Vec<f64> {
        self.to_base_polynomial()
            .coeffs()
            .iter()
            .map(|c| c.to_f64().expect("fits f64"))
            .collect()
    }
}
