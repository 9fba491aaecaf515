//! Cross-module integration checks that are too heavy for unit tests:
//! solver-route agreement at realistic sizes and the spectral-sum bound that
//! underlies the relative-stability analysis.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use padec::assembly::difference_matrix;
use padec::formula::SymmetricFormula;
use padec::poly::RationalPolynomial;
use padec::scalar::{ratio, Rational};
use padec::solver::{scheme_eigenvalues, solve_banded, solve_spectral, spectral_gap};
use padec::sturm::RootSet;

fn well_conditioned_polys() -> Vec<RationalPolynomial> {
    // P(0) = 0, P'(0) != 0, no further roots in (0, 4].
    vec![
        RationalPolynomial::new(vec![ratio(0, 1), ratio(1, 1)]), // X
        RationalPolynomial::new(vec![ratio(0, 1), ratio(1, 1), ratio(1, 1)]), // X(1+X)
        RationalPolynomial::new(vec![ratio(0, 1), ratio(1, 1), ratio(-1, 12)]),
    ]
}

#[test]
fn banded_and_spectral_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in well_conditioned_polys() {
        let d = SymmetricFormula::from_base_polynomial(p.coeffs()).to_f64();
        for n in [64usize, 257, 512] {
            let eigs = scheme_eigenvalues(&p, n);
            let min_eig = eigs.iter().fold(f64::INFINITY, |a, &b| a.min(b.abs()));
            assert!(min_eig >= 1e-6, "test premise: well conditioned");
            let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let banded = solve_banded(&difference_matrix(&d, n), &rhs).unwrap();
            let spectral = solve_spectral(&eigs, &rhs).unwrap();
            let scale = banded
                .solution
                .iter()
                .fold(0.0f64, |m, x| m.max(x.abs()));
            for j in 0..n {
                assert!(
                    (banded.solution[j] - spectral.solution[j]).abs() <= 1e-10 * scale,
                    "N={n} j={j}"
                );
            }
        }
    }
}

#[test]
fn spectral_sum_bounded_by_gap_reciprocal() {
    // sum_k 2/|P(lambda_k)| stays within a stable constant of 1/delta_{N+1}.
    let roots = RootSet::from_float_roots(&[0.0]);
    for p in well_conditioned_polys() {
        let mut fitted: Option<f64> = None;
        for n in [64usize, 128, 256, 512, 1024] {
            let sum: f64 = scheme_eigenvalues(&p, n)
                .iter()
                .map(|e| 2.0 / e.abs())
                .sum();
            let delta = spectral_gap(&roots, n + 1);
            let c = sum * delta;
            match fitted {
                None => fitted = Some(c),
                Some(c0) => {
                    assert!(
                        c <= 2.0 * c0 && c >= c0 / 2.0,
                        "constant drifted: {c0} -> {c} at N = {n}"
                    );
                }
            }
        }
    }
}

#[test]
fn resonant_amplification_is_flagged_by_spectral_solver() {
    // Pick the resolution whose eigenvalue ladder brushes the root 1/z.
    let z = 0.358946420670826_f64;
    let p = RationalPolynomial::new(vec![
        ratio(0, 1),
        ratio(1, 1),
        -Rational::from_float(z).unwrap(),
    ]);
    let n = 69; // N+1 = 70 = 2*35: a near-resonant ladder for this z
    let eigs = scheme_eigenvalues(&p, n);
    let rhs = vec![1.0; n];
    let sol = solve_spectral(&eigs, &rhs).unwrap();
    assert!(
        sol.max_amplification > 1e3,
        "expected a near-resonant amplification, got {}",
        sol.max_amplification
    );
}
