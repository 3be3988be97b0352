//! Small dense kernels: LU determinant and a cyclic Jacobi eigensolver.

use nalgebra::{DMatrix, SMatrix, SVector};

use crate::error::{Error, Result};

/// Condition-number estimate above which a determinant is logged as suspect.
pub const ILL_CONDITIONED: f64 = 1e12;

/// Determinant by LU decomposition with partial pivoting.
///
/// The matrix is consumed as workspace. An empty matrix has determinant 1.
pub fn determinant(mut a: DMatrix<f64>) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "determinant of a non-square matrix");
    let mut det = 1.0;
    let mut max_pivot: f64 = 0.0;
    let mut min_pivot = f64::INFINITY;

    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, a[(r, col)].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            a.swap_rows(pivot_row, col);
            det = -det;
        }
        let pivot = a[(col, col)];
        det *= pivot;
        max_pivot = max_pivot.max(pivot_abs);
        min_pivot = min_pivot.min(pivot_abs);
        for r in (col + 1)..n {
            let factor = a[(r, col)] / pivot;
            if factor != 0.0 {
                for c in (col + 1)..n {
                    let v = a[(col, c)];
                    a[(r, c)] -= factor * v;
                }
            }
        }
    }

    if n > 0 && max_pivot / min_pivot > ILL_CONDITIONED {
        log::debug!(
            "determinant of {n}x{n} matrix is ill-conditioned (pivot ratio {:e})",
            max_pivot / min_pivot
        );
    }
    det
}

/// Eigen-decomposition `a = V diag(λ) Vᵀ` of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<const N: usize> {
    /// Eigenvalues in ascending order.
    pub values: SVector<f64, N>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: SMatrix<f64, N, N>,
}

const JACOBI_MAX_SWEEPS: usize = 64;
const JACOBI_OFF_NORM: f64 = 1e-13;

fn off_diagonal_norm<const N: usize>(a: &SMatrix<f64, N, N>) -> f64 {
    let mut s = 0.0;
    for p in 0..N {
        for q in 0..N {
            if p != q {
                s += a[(p, q)] * a[(p, q)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigensolver for small symmetric matrices.
///
/// Sweeps visit the pairs `(p, q)`, `p < q`, in row order, so the result is
/// deterministic. Iteration stops once the off-diagonal Frobenius norm falls
/// below `1e-13` (scaled by the matrix norm when that exceeds one).
pub fn jacobi_eigen<const N: usize>(a: &SMatrix<f64, N, N>) -> Result<SymmetricEigen<N>> {
    let mut a = *a;
    let mut v = SMatrix::<f64, N, N>::identity();
    let threshold = JACOBI_OFF_NORM * a.norm().max(1.0);

    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a);
    while off > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNonConvergence {
                sweeps,
                off_norm: off,
            });
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..N {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;

                for k in 0..N {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&a);
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = SVector::<f64, N>::from_fn(|i, _| a[(order[i], order[i])]);
    let vectors = SMatrix::<f64, N, N>::from_fn(|r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Ascending eigenvalues of a small symmetric matrix.
pub fn symmetric_eigenvalues<const N: usize>(a: &SMatrix<f64, N, N>) -> Result<SVector<f64, N>> {
    jacobi_eigen(a).map(|e| e.values)
}
