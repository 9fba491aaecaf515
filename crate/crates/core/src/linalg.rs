//! Exact dense linear algebra over the rationals.
//!
//! Systems here are tiny (weight constructions top out around 15 unknowns),
//! so plain fraction-arithmetic Gaussian elimination is the right tool.

use num_traits::{One, Zero};

use crate::scalar::Rational;

/// Solve `A x = b` exactly. Returns `None` when `A` is singular.
pub fn solve_dense(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
            let sub = &factor * &b[col];
            b[r] -= sub;
        }
    }
    Some(
        (0..n)
            .map(|i| &b[i] / &a[i][i])
            .collect(),
    )
}

/// Basis of the nullspace of a (rows x cols) matrix, by reduced row echelon
/// form. Each basis vector has a 1 in its free column.
pub fn nullspace(mut a: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    if a.is_empty() {
        return Vec::new();
    }
    let rows = a.len();
    let cols = a[0].len();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(pr) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, pr);
        let inv = Rational::one() / a[row][col].clone();
        for c in col..cols {
            a[row][c] = &a[row][c] * &inv;
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..cols {
                    let sub = &factor * &a[row][c];
                    a[r][c] -= sub;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    free_cols
        .iter()
        .map(|&fc| {
            let mut v = vec![Rational::zero(); cols];
            v[fc] = Rational::one();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[r][fc].clone();
            }
            v
        })
        .collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn solves_vandermonde_exactly() {
        // Nodes 0, 1, 2; interpolate squares: x(t) = t^2 at those nodes.
        let a: Vec<Vec<Rational>> = (0..3)
            .map(|i| (0..3).map(|j| ratio((i as i64).pow(j as u32), 1)).collect())
            .collect();
        let b = vec![ratio(0, 1), ratio(1, 1), ratio(4, 1)];
        let x = solve_dense(a, b).unwrap();
        assert_eq!(x, vec![ratio(0, 1), ratio(0, 1), ratio(1, 1)]);
    }

    #[test]
    fn singular_system_returns_none() {
        let a = vec![
            vec![ratio(1, 1), ratio(2, 1)],
            vec![ratio(2, 1), ratio(4, 1)],
        ];
        assert!(solve_dense(a, vec![ratio(1, 1), ratio(2, 1)]).is_none());
    }

    #[test]
    fn nullspace_of_rank_one_map() {
        // x + y + z = 0 has a 2-dimensional nullspace.
        let a = vec![vec![ratio(1, 1), ratio(1, 1), ratio(1, 1)]];
        let ns = nullspace(a);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let s: Rational = v.iter().cloned().sum();
            assert!(s.is_zero());
        }
    }
}
