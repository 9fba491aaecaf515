use padec::experiments::{run_liouville, QuadraticIrrational};
use padec::pade::{optimal_scheme, optimal_scheme_direct};
use padec::solver::spectral_gap;
use padec::sturm::RootSet;
use std::time::Instant;

fn main() {
    // Liouville demo infimum over N <= 2000.
    for (p, q, r, s, name) in [(-1i64, 1i64, 2i64, 1i64, "sqrt2-1"), (-1, 1, 5, 2, "golden")] {
        let alpha = QuadraticIrrational::new(p, q, r, s).unwrap();
        let ns: Vec<usize> = (1..=20).map(|k| 100 * k).collect();
        let t = Instant::now();
        let rep = run_liouville(alpha, &ns);
        println!("{name}: inf_c = {} ({:?})", rep.relative.infimum, t.elapsed());
    }
    // delta_q stability of q^2 * delta_q over q in 10..=5000.
    let roots = RootSet::from_float_roots(&[0.0]);
    let t = Instant::now();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for q in 10..=5000usize {
        let c = (q * q) as f64 * spectral_gap(&roots, q);
        lo = lo.min(c);
        hi = hi.max(c);
    }
    println!("delta_q: c in [{lo}, {hi}] ratio {} ({:?})", hi / lo, t.elapsed());
    // Route equivalence timing, l+m <= 8.
    let t = Instant::now();
    let mut count = 0;
    for l in 0..=8usize {
        for m in 0..=(8 - l) {
            let a = optimal_scheme(l, m).unwrap();
            let b = optimal_scheme_direct(l, m).unwrap();
            assert_eq!(a.d, b.d);
            assert_eq!(a.s, b.s);
            count += 1;
        }
    }
    println!("route equivalence: {count} pairs in {:?}", t.elapsed());
}
