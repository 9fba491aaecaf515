//! Exact real-root counting, localization and isolation by Sturm sequences.
//!
//! Counting always goes through the squarefree part, and evaluation points
//! are kept off the roots (endpoint roots are deflated exactly, interior
//! rational roots hit by a split point trigger a deflate-and-restart), so
//! the sign-variation bookkeeping never degenerates.

use num_traits::{FromPrimitive, Signed, ToPrimitive};

use crate::poly::RationalPolynomial;
use crate::scalar::Rational;

/// Canonical chain `p, p', -rem(...), ...` (the zero terminator dropped).
pub fn sturm_chain(p: &RationalPolynomial) -> Vec<RationalPolynomial> {
    let mut chain = vec![p.clone(), p.derivative()];
    while !chain.last().unwrap().is_zero() {
        let k = chain.len();
        let (_, r) = chain[k - 2].div_rem(&chain[k - 1]);
        chain.push(r.neg());
    }
    chain.pop();
    chain
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

pub fn variations_at(chain: &[RationalPolynomial], x: &Rational) -> usize {
    variations(chain.iter().map(|p| p.sign_at(x)))
}

/// `p / gcd(p, p')`: same distinct roots, all simple.
pub fn squarefree_part(p: &RationalPolynomial) -> RationalPolynomial {
    let g = p.gcd(&p.derivative());
    match g.degree() {
        None | Some(0) => p.clone(),
        _ => p.div_rem(&g).0,
    }
}

fn linear_factor(root: &Rational) -> RationalPolynomial {
    RationalPolynomial::new(vec![-root.clone(), Rational::from_i64(1).unwrap()])
}

/// Distinct real roots in the open interval `(a, b)`; requires nonzero
/// values at both endpoints.
pub fn count_roots_open(p: &RationalPolynomial, a: &Rational, b: &Rational) -> usize {
    assert!(a < b);
    let q = squarefree_part(p);
    assert!(q.sign_at(a) != 0 && q.sign_at(b) != 0, "endpoint on a root");
    let chain = sturm_chain(&q);
    let va = variations_at(&chain, a);
    let vb = variations_at(&chain, b);
    debug_assert!(va >= vb);
    va - vb
}

/// Distinct real roots in the closed interval `[lo, hi]`. Endpoint roots are
/// deflated exactly before the interior count.
pub fn count_roots_closed(p: &RationalPolynomial, lo: &Rational, hi: &Rational) -> usize {
    assert!(!p.is_zero(), "the zero polynomial vanishes everywhere");
    assert!(lo <= hi);
    let mut q = squarefree_part(p);
    let mut count = 0;
    for endpoint in [lo, hi] {
        if q.sign_at(endpoint) == 0 {
            count += 1;
            q = q.div_rem(&linear_factor(endpoint)).0;
        }
        if lo == hi {
            return count.min(1);
        }
    }
    match q.degree() {
        None | Some(0) => count,
        _ => count + count_roots_open(&q, lo, hi),
    }
}

/// True iff `p` has no real root in the closed interval `[lo, hi]`.
pub fn has_no_root_in(p: &RationalPolynomial, lo: &Rational, hi: &Rational) -> bool {
    count_roots_closed(p, lo, hi) == 0
}

/// A real root caught in an isolating interval, with a float refinement.
#[derive(Debug, Clone)]
pub struct IsolatedRoot {
    /// Exact isolating interval; degenerate (`lo == hi`) for roots found at
    /// rational evaluation points.
    pub interval: (Rational, Rational),
    /// Float value (midpoint of the final interval).
    pub value: f64,
    /// True when the root is a repeated root of the original polynomial.
    pub multiple: bool,
}

/// The roots of a polynomial inside a closed interval.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<IsolatedRoot>,
}

impl RootSet {
    /// Root set assembled from already-known float roots (used by demos that
    /// build their polynomials from transcendental data).
    pub fn from_float_roots(values: &[f64]) -> Self {
        RootSet {
            roots: values
                .iter()
                .map(|&v| {
                    let r = Rational::from_f64(v).expect("finite root value");
                    IsolatedRoot {
                        interval: (r.clone(), r),
                        value: v,
                        multiple: false,
                    }
                })
                .collect(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// A split point strictly inside `(a, b)` where `q` does not vanish, or an
/// exact root it stumbled on.
enum Split {
    At(Rational),
    Root(Rational),
}

fn split_point(q: &RationalPolynomial, a: &Rational, b: &Rational) -> Split {
    let width = b - a;
    for (num, den) in [(1i64, 2i64), (3, 7), (4, 7), (2, 5), (3, 5), (1, 3), (2, 3)] {
        let m = a + &width * Rational::new(num.into(), den.into());
        if q.sign_at(&m) != 0 {
            return Split::At(m);
        } else if num == 1 && den == 2 {
            return Split::Root(m);
        }
    }
    // More candidates than a small polynomial has roots.
    let mut k = 5i64;
    loop {
        let m = a + &width * Rational::new(1.into(), k.into());
        if q.sign_at(&m) != 0 {
            return Split::At(m);
        }
        k += 1;
    }
}

/// Isolate all distinct real roots of `p` in `[lo, hi]` into intervals of
/// width `<= width`, flagging multiplicity against `gcd(p, p')`. Exact; the
/// open isolating intervals are pairwise disjoint and each contains exactly
/// one root.
pub fn isolate_roots(
    p: &RationalPolynomial,
    lo: &Rational,
    hi: &Rational,
    width: &Rational,
) -> RootSet {
    assert!(!p.is_zero() && lo <= hi && width.is_positive());
    let gcd = p.gcd(&p.derivative());
    let gcd_nontrivial = matches!(gcd.degree(), Some(d) if d >= 1);

    // Exact rational roots get recorded directly; everything else is bisected.
    let mut exact_roots: Vec<Rational> = Vec::new();
    let mut q = squarefree_part(p);
    for endpoint in [lo, hi] {
        if q.sign_at(endpoint) == 0 {
            exact_roots.push(endpoint.clone());
            q = q.div_rem(&linear_factor(endpoint)).0;
        }
        if lo == hi {
            break;
        }
    }

    // Deflate-and-restart loop: a split point landing on a root shrinks q.
    let mut intervals: Vec<(Rational, Rational)> = Vec::new();
    'restart: loop {
        intervals.clear();
        if matches!(q.degree(), None | Some(0)) || lo == hi {
            break;
        }
        let chain = sturm_chain(&q);
        let mut stack = vec![(lo.clone(), hi.clone())];
        while let Some((a, b)) = stack.pop() {
            let count = variations_at(&chain, &a) - variations_at(&chain, &b);
            if count == 0 {
                continue;
            }
            if count == 1 && (&b - &a) <= *width {
                intervals.push((a, b));
                continue;
            }
            match split_point(&q, &a, &b) {
                Split::At(m) => {
                    stack.push((a, m.clone()));
                    stack.push((m, b));
                }
                Split::Root(m) => {
                    exact_roots.push(m.clone());
                    q = q.div_rem(&linear_factor(&m)).0;
                    continue 'restart;
                }
            }
        }
        break;
    }

    let is_multiple = |a: &Rational, b: &Rational| -> bool {
        if !gcd_nontrivial {
            return false;
        }
        if a == b {
            return gcd.sign_at(a) == 0;
        }
        count_roots_closed(&gcd, a, b) > 0
    };

    let mut roots: Vec<IsolatedRoot> = exact_roots
        .into_iter()
        .map(|r| IsolatedRoot {
            value: r.to_f64().unwrap(),
            multiple: is_multiple(&r, &r),
            interval: (r.clone(), r),
        })
        .collect();
    for (a, b) in intervals {
        let two = Rational::from_i64(2).unwrap();
        roots.push(IsolatedRoot {
            value: ((&a + &b) / two).to_f64().unwrap(),
            multiple: is_multiple(&a, &b),
            interval: (a, b),
        });
    }
    roots.sort_by(|x, y| x.value.total_cmp(&y.value));
    RootSet { roots }
}

/// Isolation width `2^-48`, enough to pin a root to ~4e-15.
pub fn default_isolation_width() -> Rational {
    Rational::new(1.into(), (1i64 << 48).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn poly(coeffs: &[(i64, i64)]) -> RationalPolynomial {
        RationalPolynomial::new(coeffs.iter().map(|&(n, d)| ratio(n, d)).collect())
    }

    #[test]
    fn detects_root_inside_interval() {
        // X - 3 has a root in [0, 4] but none in [4, 10].
        let p = poly(&[(-3, 1), (1, 1)]);
        assert!(!has_no_root_in(&p, &ratio(0, 1), &ratio(4, 1)));
        assert!(has_no_root_in(&p, &ratio(4, 1), &ratio(10, 1)));
    }

    #[test]
    fn constants_have_no_roots() {
        let one = RationalPolynomial::one();
        assert!(has_no_root_in(&one, &ratio(0, 1), &ratio(4, 1)));
    }

    #[test]
    fn endpoint_roots_are_counted() {
        // X (X - 4): roots exactly at both endpoints of [0, 4].
        let p = poly(&[(0, 1), (-4, 1), (1, 1)]);
        assert_eq!(count_roots_closed(&p, &ratio(0, 1), &ratio(4, 1)), 2);
        assert!(!has_no_root_in(&p, &ratio(4, 1), &ratio(5, 1)));
        assert!(has_no_root_in(&p, &ratio(5, 1), &ratio(6, 1)));
        // Degenerate interval.
        assert_eq!(count_roots_closed(&p, &ratio(0, 1), &ratio(0, 1)), 1);
        assert_eq!(count_roots_closed(&p, &ratio(1, 1), &ratio(1, 1)), 0);
    }

    #[test]
    fn multiple_roots_counted_once() {
        // (X - 1)^3
        let lin = poly(&[(-1, 1), (1, 1)]);
        let p = lin.mul(&lin).mul(&lin);
        assert_eq!(count_roots_closed(&p, &ratio(0, 1), &ratio(4, 1)), 1);
    }

    #[test]
    fn isolates_sqrt2() {
        // X^2 - 2 on [0, 4]: exactly one root, at sqrt(2).
        let p = poly(&[(-2, 1), (0, 1), (1, 1)]);
        let rs = isolate_roots(&p, &ratio(0, 1), &ratio(4, 1), &default_isolation_width());
        assert_eq!(rs.roots.len(), 1);
        let r = &rs.roots[0];
        assert!(!r.multiple);
        assert!((r.value - 2.0f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn flags_multiplicity() {
        // (X - 1)^2 (X - 3): the doubled root sits exactly on a natural
        // bisection midpoint of [0, 4].
        let lin1 = poly(&[(-1, 1), (1, 1)]);
        let lin3 = poly(&[(-3, 1), (1, 1)]);
        let full = lin1.mul(&lin1).mul(&lin3);
        let rs = isolate_roots(&full, &ratio(0, 1), &ratio(4, 1), &default_isolation_width());
        assert_eq!(rs.roots.len(), 2);
        let near = |v: f64, t: f64| (v - t).abs() < 1e-12;
        assert!(rs.roots.iter().any(|r| near(r.value, 1.0) && r.multiple));
        assert!(rs.roots.iter().any(|r| near(r.value, 3.0) && !r.multiple));
    }

    #[test]
    fn zero_endpoint_root_is_reported_once() {
        // X (X - 2): root at lo = 0 plus one interior root (also a rational
        // point the splitter will hit).
        let p = poly(&[(0, 1), (-2, 1), (1, 1)]);
        let rs = isolate_roots(&p, &ratio(0, 1), &ratio(4, 1), &default_isolation_width());
        assert_eq!(rs.roots.len(), 2);
        assert_eq!(rs.roots[0].value, 0.0);
        assert!((rs.roots[1].value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn close_roots_are_separated() {
        // (X - 1)(X - 1001/1000)
        let p = poly(&[(-1, 1), (1, 1)]).mul(&poly(&[(-1001, 1000), (1, 1)]));
        let rs = isolate_roots(&p, &ratio(0, 1), &ratio(2, 1), &default_isolation_width());
        assert_eq!(rs.roots.len(), 2);
        assert!((rs.roots[0].value - 1.0).abs() < 1e-12);
        assert!((rs.roots[1].value - 1.001).abs() < 1e-12);
    }

    #[test]
    fn no_real_roots_at_all() {
        // X^2 + 1
        let p = poly(&[(1, 1), (0, 1), (1, 1)]);
        let rs = isolate_roots(&p, &ratio(-10, 1), &ratio(10, 1), &default_isolation_width());
        assert!(rs.is_empty());
        assert!(has_no_root_in(&p, &ratio(-10, 1), &ratio(10, 1)));
    }
}
