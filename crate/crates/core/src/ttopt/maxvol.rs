//! Dominant square submatrix selection.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Entries of `M M[I]^-1` may exceed 1 by this much at convergence.
pub const MAXVOL_TOL: f64 = 0.01;
pub const MAXVOL_MAX_ITERS: usize = 100;

/// Selects `cols` rows of a tall matrix forming a dominant submatrix: every
/// entry of `M M[I]^-1` is at most `1 + tol` in absolute value.
///
/// Starts from the pivots of Gaussian elimination with partial pivoting and
/// then swaps rows greedily, one at a time and, once that stalls, two at a
/// time. Rank-deficient input is perturbed on the leading diagonal once
/// before giving up.
pub fn maxvol(m: &DMatrix<f64>) -> Result<Vec<usize>> {
    maxvol_with(m, MAXVOL_TOL, MAXVOL_MAX_ITERS)
}

pub fn maxvol_with(m: &DMatrix<f64>, tol: f64, max_iters: usize) -> Result<Vec<usize>> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(Vec::new());
    }
    if rows < cols {
        return Err(Error::Selection(format!(
            "need at least as many rows as columns, got {rows}x{cols}"
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Selection("matrix has non-finite entries".into()));
    }
    let scale = m.amax();
    if scale == 0.0 {
        return Err(Error::Selection("matrix is zero".into()));
    }

    let mut work = m.clone();
    let mut pivots = pivot_rows(&work, scale);
    if pivots.is_none() {
        let eps = 1e-10 * scale;
        for i in 0..cols {
            work[(i, i)] += eps;
        }
        pivots = pivot_rows(&work, scale);
    }
    let mut index = pivots.ok_or_else(|| Error::Selection("matrix is rank deficient".into()))?;

    let mut coef = coefficients(&work, &index)?;
    let mut iters = 0;
    while iters < max_iters {
        iters += 1;
        let (mut bi, mut bj, mut big) = (0, 0, 0.0);
        for j in 0..cols {
            for i in 0..rows {
                let v = coef[(i, j)].abs();
                if v > big {
                    (bi, bj, big) = (i, j, v);
                }
            }
        }
        if big > 1.0 + tol {
            // Swapping row index[bj] for row bi scales the volume by |coef[bi, bj]|.
            let pivot = coef[(bi, bj)];
            let x = coef.column(bj).clone_owned();
            let mut y = coef.row(bi).clone_owned();
            y[bj] -= 1.0;
            coef -= x * (y / pivot);
            index[bj] = bi;
            continue;
        }
        match best_pair_swap(&coef, &index, tol) {
            Some((i1, j1, i2, j2)) => {
                index[j1] = i1;
                index[j2] = i2;
                coef = coefficients(&work, &index)?;
            }
            None => break,
        }
    }
    Ok(index)
}

fn coefficients(m: &DMatrix<f64>, index: &[usize]) -> Result<DMatrix<f64>> {
    let cols = m.ncols();
    let square = DMatrix::from_fn(cols, cols, |i, j| m[(index[i], j)]);
    let inv = square
        .try_inverse()
        .ok_or_else(|| Error::Selection("pivot submatrix is singular".into()))?;
    Ok(m * inv)
}

/// Best exchange of two selected rows at once; the volume changes by the
/// determinant of the matching 2x2 block of `coef`. Only rows with an entry
/// above one half can take part in a gain above one.
fn best_pair_swap(coef: &DMatrix<f64>, index: &[usize], tol: f64) -> Option<(usize, usize, usize, usize)> {
    let (rows, cols) = coef.shape();
    if cols < 2 {
        return None;
    }
    let live: Vec<usize> = (0..rows)
        .filter(|&i| !index.contains(&i) && coef.row(i).amax() >= 0.49)
        .collect();
    let mut best = (1.0 + tol, None);
    for j1 in 0..cols {
        for j2 in j1 + 1..cols {
            for (a, &i1) in live.iter().enumerate() {
                for &i2 in &live[a + 1..] {
                    let det = (coef[(i1, j1)] * coef[(i2, j2)] - coef[(i1, j2)] * coef[(i2, j1)]).abs();
                    if det > best.0 {
                        best = (det, Some((i1, j1, i2, j2)));
                    }
                }
            }
        }
    }
    best.1
}

/// Row pivots of partial-pivoting elimination, or `None` if a pivot vanishes.
fn pivot_rows(m: &DMatrix<f64>, scale: f64) -> Option<Vec<usize>> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut order: Vec<usize> = (0..rows).collect();
    for j in 0..cols {
        let (p, best) = (j..rows)
            .map(|i| (i, a[(i, j)].abs()))
            .fold((j, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        if best <= 1e-13 * scale {
            return None;
        }
        a.swap_rows(j, p);
        order.swap(j, p);
        let piv = a[(j, j)];
        for i in j + 1..rows {
            let f = a[(i, j)] / piv;
            if f != 0.0 {
                for c in j..cols {
                    let v = a[(j, c)];
                    a[(i, c)] -= f * v;
                }
            }
        }
    }
    Some(order[..cols].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_top_block_is_kept() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.5, 0.5]);
        let mut idx = maxvol(&m).unwrap();
        idx.sort();
        assert_eq!(idx, vec![0, 1]);
    }

    #[test]
    fn single_column_picks_largest_magnitude() {
        let m = DMatrix::from_column_slice(3, 1, &[1.0, -3.0, 2.0]);
        assert_eq!(maxvol(&m).unwrap(), vec![1]);
    }

    #[test]
    fn square_input_selects_everything() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 1.0, 0.0]);
        let mut idx = maxvol(&m).unwrap();
        idx.sort();
        assert_eq!(idx, vec![0, 1]);
    }

    #[test]
    fn rank_deficient_input_is_regularized() {
        let m = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0]);
        let idx = maxvol(&m).unwrap();
        assert_eq!(idx.len(), 2);
        assert_ne!(idx[0], idx[1]);
    }

    #[test]
    fn rejects_wide_and_zero_matrices() {
        assert!(maxvol(&DMatrix::<f64>::zeros(1, 2)).is_err());
        assert!(maxvol(&DMatrix::<f64>::zeros(3, 2)).is_err());
    }
}
