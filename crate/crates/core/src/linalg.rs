//! Dense exact linear algebra over [`Scalar`]: row reduction, determinants,
//! inverses and linear solves with a uniqueness diagnostic.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Matrix = Vec<Vec<Scalar>>;

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    Unique(Vec<Scalar>),
    Inconsistent,
    Underdetermined { rank: usize, unknowns: usize },
}

/// Reduced row echelon form in place. Returns pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

pub fn determinant(m: &Matrix) -> Scalar {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Scalar::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = &det * &a[c][c];
        let inv = a[c][c].inv().expect("pivot is nonzero");
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let d = &f * &a[c][j];
                a[i][j] = &a[i][j] - &d;
            }
        }
    }
    det
}

pub fn inverse(m: &Matrix) -> Result<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return Err(Error::domain("matrix is singular"));
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(Scalar::zero(), |acc, k| &acc + &(&row[k] * &b[k][j]))
                })
                .collect()
        })
        .collect()
}

/// Solves `rows * x = rhs` where each entry of `rows` is one equation.
pub fn solve(rows: &[Vec<Scalar>], rhs: &[Scalar], unknowns: usize) -> Solution {
    let mut aug: Matrix = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    if aug.is_empty() {
        return Solution::Underdetermined { rank: 0, unknowns };
    }
    let pivots = rref(&mut aug);
    if pivots.contains(&unknowns) {
        return Solution::Inconsistent;
    }
    if pivots.len() < unknowns {
        return Solution::Underdetermined {
            rank: pivots.len(),
            unknowns,
        };
    }
    Solution::Unique(aug.iter().take(unknowns).map(|r| r[unknowns].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
            .collect()
    }

    #[test]
    fn det_and_inverse_a2() {
        let g = m(&[&[2, -1], &[-1, 2]]);
        assert_eq!(determinant(&g), Scalar::from_int(3));
        let inv = inverse(&g).unwrap();
        assert_eq!(inv[0][0], Scalar::from_ratio(2, 3));
        assert_eq!(inv[0][1], Scalar::from_ratio(1, 3));
        let id = mat_mul(&g, &inv);
        assert_eq!(id, m(&[&[1, 0], &[0, 1]]));
    }

    #[test]
    fn singular_has_no_inverse() {
        let g = m(&[&[1, 2], &[2, 4]]);
        assert!(inverse(&g).is_err());
        assert_eq!(rank(&g), 1);
    }

    #[test]
    fn solve_outcomes() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let s = solve(&a, &[Scalar::from_int(3), Scalar::from_int(1)], 2);
        assert_eq!(s, Solution::Unique(vec![Scalar::from_int(2), Scalar::from_int(1)]));
        let b = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(
            solve(&b, &[Scalar::from_int(1), Scalar::from_int(3)], 2),
            Solution::Inconsistent
        );
        assert_eq!(
            solve(&b, &[Scalar::from_int(1), Scalar::from_int(2)], 2),
            Solution::Underdetermined { rank: 1, unknowns: 2 }
        );
    }
}
