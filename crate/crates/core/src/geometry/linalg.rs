//! Exact Gaussian elimination helpers: rank, linear solve, kernels.

use num_traits::{One, Zero};

use crate::rational::{Rational, Vector};

/// Reduced row echelon form, in place. Returns pivot column indices.
pub fn rref(rows: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(pr) = (r..nrows).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x /= &inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for c in 0..ncols {
                    let delta = &f * &rows[r][c];
                    rows[i][c] -= delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == nrows {
            break;
        }
    }
    pivots
}

/// Rank over the rationals. The empty list has rank 0.
pub fn rank_of(vectors: &[Vector]) -> usize {
    let mut rows: Vec<Vec<Rational>> = vectors.iter().map(|v| v.0.clone()).collect();
    rref(&mut rows).len()
}

/// One solution of `A x = b` (rows of `a` are the equations), if any.
pub fn solve(a: &[Vector], b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(a.len(), b.len());
    let ncols = a.first().map_or(0, Vector::dim);
    let mut rows: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.0.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut rows);
    if pivots.contains(&ncols) {
        return None; // inconsistent
    }
    let mut x = vec![Rational::zero(); ncols];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = rows[i][ncols].clone();
    }
    Some(x)
}

/// Basis of the kernel of the linear map `x -> (row_i . x)_i`,
/// i.e. all vectors orthogonal to every given row.
pub fn kernel_basis(rows_in: &[Vector], dim: usize) -> Vec<Vector> {
    let mut rows: Vec<Vec<Rational>> = rows_in.iter().map(|v| v.0.clone()).collect();
    if rows.is_empty() {
        rows.push(vec![Rational::zero(); dim]);
    }
    let pivots = rref(&mut rows);
    let mut basis = Vec::new();
    for free in 0..dim {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Rational::zero(); dim];
        v[free] = Rational::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -rows[i][free].clone();
        }
        basis.push(Vector(v));
    }
    basis
}

/// A nontrivial coefficient vector `g` with `sum g_i * columns_i = 0`,
/// or `None` when the columns are linearly independent.
pub fn column_dependency(columns: &[Vector]) -> Option<Vec<Rational>> {
    if columns.is_empty() {
        return None;
    }
    let dim = columns[0].dim();
    // rows of the "transposed" system: one row per coordinate
    let rows: Vec<Vector> = (0..dim)
        .map(|coord| Vector(columns.iter().map(|c| c[coord].clone()).collect()))
        .collect();
    kernel_basis(&rows, columns.len())
        .into_iter()
        .next()
        .map(|v| v.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn rank_basics() {
        assert_eq!(rank_of(&[]), 0);
        assert_eq!(
            rank_of(&[Vector::from_ints(&[1, 0]), Vector::from_ints(&[0, 1])]),
            2
        );
        assert_eq!(
            rank_of(&[Vector::from_ints(&[1, 1]), Vector::from_ints(&[2, 2])]),
            1
        );
    }

    #[test]
    fn solve_and_kernel() {
        let a = [Vector::from_ints(&[1, 1]), Vector::from_ints(&[1, -1])];
        let x = solve(&a, &[rat(3), rat(1)]).unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
        assert!(solve(&[Vector::from_ints(&[0, 0])], &[rat(1)]).is_none());

        let k = kernel_basis(&[Vector::from_ints(&[1, 1, 0])], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(Vector::from_ints(&[1, 1, 0]).dot(v).is_zero());
        }
    }

    #[test]
    fn dependency_among_columns() {
        let cols = [
            Vector::from_ints(&[1, 0]),
            Vector::from_ints(&[0, 1]),
            Vector::from_ints(&[1, 1]),
        ];
        let g = column_dependency(&cols).unwrap();
        // check sum g_i c_i = 0
        let mut acc = Vector::zero(2);
        for (gi, c) in g.iter().zip(&cols) {
            acc = &acc + &c.scale(gi);
        }
        assert!(acc.is_zero());
        assert!(g.iter().any(|x| !x.is_zero()));

        assert!(column_dependency(&cols[..2]).is_none());
    }
}
