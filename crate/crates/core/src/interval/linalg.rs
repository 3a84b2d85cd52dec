//! Small dense helpers for the boundary construction.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes the components of `v` along the orthonormal `basis`
/// (two passes of modified Gram-Schmidt).
pub(crate) fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(v, q);
            v.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
        }
    }
}

/// Extends the orthonormal `basis` with the candidates, in order, skipping
/// any whose remainder falls below `rel_tol` times its original norm.
/// Stops once `limit` vectors have been added.
pub(crate) fn extend_basis(
    basis: &mut Vec<Vec<f64>>,
    candidates: impl IntoIterator<Item = Vec<f64>>,
    rel_tol: f64,
    limit: usize,
) -> usize {
    let mut added = 0;
    for mut v in candidates {
        if added == limit {
            break;
        }
        let before = norm(&v);
        if before == 0.0 {
            continue;
        }
        orthogonalize(&mut v, basis);
        let after = norm(&v);
        if after > rel_tol * before {
            v.iter_mut().for_each(|x| *x /= after);
            basis.push(v);
            added += 1;
        }
    }
    added
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting; `None` when singular.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
