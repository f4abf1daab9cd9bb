//! Dense Gaussian elimination over an exact (or tolerant) scalar field.
//!
//! Small matrices only; pivoting picks the first usable entry so that exact
//! runs are deterministic.

use crate::scalar::Scalar;

/// Reduced row echelon form in place. Returns the pivot column of each pivot
/// row, in order.
pub fn rref<W: Scalar>(mat: &mut [Vec<W>]) -> Vec<usize> {
    let rows = mat.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !mat[r][col].is_negligible()) else {
            continue;
        };
        mat.swap(row, p);
        let inv = W::one() / mat[row][col].clone();
        for c in col..cols {
            mat[row][c] = mat[row][c].clone() * inv.clone();
        }
        for r in 0..rows {
            if r != row && !mat[r][col].is_negligible() {
                let factor = mat[r][col].clone();
                for c in col..cols {
                    let delta = factor.clone() * mat[row][c].clone();
                    mat[r][c] = mat[r][c].clone() - delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Basis of the nullspace of the homogeneous system given by `rows` over
/// `cols` unknowns. Basis vectors use the standard free-variable
/// parameterization, listed in increasing free-column order.
pub fn nullspace<W: Scalar>(rows: &[Vec<W>], cols: usize) -> Vec<Vec<W>> {
    let mut mat: Vec<Vec<W>> = rows.to_vec();
    let pivots = rref(&mut mat);
    let pivot_set: Vec<Option<usize>> = {
        let mut v = vec![None; cols];
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = Some(r);
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set[free].is_some() {
            continue;
        }
        let mut vec = vec![W::zero(); cols];
        vec[free] = W::one();
        for (col, rowidx) in pivot_set.iter().enumerate() {
            if let Some(r) = rowidx {
                vec[col] = W::zero() - mat[*r][free].clone();
            }
        }
        basis.push(vec);
    }
    basis
}

/// Inverse of a square matrix, or `None` when singular.
pub fn invert<W: Scalar>(a: &[Vec<W>]) -> Option<Vec<Vec<W>>> {
    let n = a.len();
    let mut aug: Vec<Vec<W>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "invert needs a square matrix");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { W::one() } else { W::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, Rational};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
            .collect()
    }

    #[test]
    fn nullspace_of_sum_constraint() {
        // x + y + z = 0 has a 2-dimensional nullspace
        let basis = nullspace(&m(&[&[1, 1, 1]]), 3);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            let s: Rational = v.iter().cloned().sum();
            assert_eq!(s, rat(0, 1));
        }
    }

    #[test]
    fn invert_round_trips() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = invert(&a).unwrap();
        // a · inv = I
        for i in 0..2 {
            for j in 0..2 {
                let mut s = rat(0, 1);
                for k in 0..2 {
                    s += a[i][k].clone() * inv[k][j].clone();
                }
                assert_eq!(s, if i == j { rat(1, 1) } else { rat(0, 1) });
            }
        }
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        assert!(invert(&m(&[&[1, 2], &[2, 4]])).is_none());
    }
}
