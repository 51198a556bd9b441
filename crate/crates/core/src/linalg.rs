//! Small dense linear-algebra helpers.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::C64;

/// Basis of the null space of a rational matrix (Gauss–Jordan elimination).
pub fn rational_nullspace(mut rows: Vec<Vec<BigRational>>, ncols: usize) -> Vec<Vec<BigRational>> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = BigRational::one() / rows[r][col].clone();
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = rows[i][col].clone();
                let pivot = rows[r].clone();
                for (v, p) in rows[i].iter_mut().zip(&pivot) {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[i][f].clone();
            }
            v
        })
        .collect()
}

/// Orthonormal basis of the numerical null space of a complex matrix;
/// singular values below `rel_tol` times the largest (or below `rel_tol`
/// when the matrix is tiny) count as zero.
pub fn complex_nullspace(m: &DMatrix<C64>, rel_tol: f64) -> Vec<Vec<C64>> {
    let (nrows, ncols) = m.shape();
    if ncols == 0 {
        return Vec::new();
    }
    // Pad to at least square so the SVD returns a full set of right vectors.
    let rows = nrows.max(ncols);
    let mut padded = DMatrix::<C64>::zeros(rows, ncols);
    padded.view_mut((0, 0), (nrows, ncols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = rel_tol * smax.max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(k, _)| v_t.row(k).iter().map(|z| z.conj()).collect())
        .collect()
}

/// Least-squares coefficients of `target` in the span of `basis` (complex),
/// with the max-norm of the residual.
pub fn least_squares(basis: &[&[C64]], target: &[C64]) -> (Vec<C64>, f64) {
    let n = target.len();
    let k = basis.len();
    let a = DMatrix::<C64>::from_fn(n, k, |i, j| basis[j][i]);
    let b = DMatrix::<C64>::from_fn(n, 1, |i, _| target[i]);
    let svd = a.clone().svd(true, true);
    let coef = svd
        .solve(&b, 1e-12)
        .map(|x| x.iter().cloned().collect::<Vec<_>>())
        .unwrap_or_else(|_| vec![C64::new(0.0, 0.0); k]);
    let fitted = &a * DMatrix::<C64>::from_column_slice(k, 1, &coef);
    let resid = (0..n).map(|i| (fitted[(i, 0)] - target[i]).norm()).fold(0.0, f64::max);
    (coef, resid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn rational_kernel() {
        // x + y - z = 0, 2x + 2y - 2z = 0  -> 2-dimensional kernel
        let rows = vec![vec![q(1), q(1), q(-1)], vec![q(2), q(2), q(-2)]];
        let ker = rational_nullspace(rows.clone(), 3);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            for row in &rows {
                let dot: BigRational = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero());
            }
        }
        assert!(rational_nullspace(vec![vec![q(1), q(0)], vec![q(0), q(1)]], 2).is_empty());
    }

    #[test]
    fn complex_kernel_and_lstsq() {
        let m = DMatrix::from_row_slice(1, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let ker = complex_nullspace(&m, 1e-10);
        assert_eq!(ker.len(), 1);
        let v = &ker[0];
        assert!((v[0] + C64::new(0.0, 1.0) * v[1]).norm() < 1e-12);

        let b1 = [C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
        let b2 = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
        let t = [C64::new(3.0, 0.0), C64::new(-1.0, 0.0)];
        let (coef, resid) = least_squares(&[&b1, &b2], &t);
        assert!((coef[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((coef[1] - C64::new(2.0, 0.0)).norm() < 1e-12);
        assert!(resid < 1e-12);
    }
}
