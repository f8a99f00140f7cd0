//! Finite-dimensional state space: vectors carry the sup-norm, matrices the
//! induced operator norm (maximum absolute row sum).

use nalgebra::{DMatrix, DVector};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// `‖x‖ = max_i |x_i|`.
pub fn sup_norm(x: &Vector) -> f64 {
    x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// `|A| = max_i Σ_j |a_ij|`, the operator norm induced by [`sup_norm`].
pub fn row_sum_norm(a: &Matrix) -> f64 {
    a.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max)
}

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

pub fn zeros(n: usize) -> Vector {
    Vector::zeros(n)
}

/// Exact comparison against the identity; used to route the `P = I` fast path.
pub fn is_identity(a: &Matrix) -> bool {
    a.is_square()
        && a.iter().enumerate().all(|(k, &v)| {
            let (i, j) = (k % a.nrows(), k / a.nrows());
            if i == j {
                v == 1.0
            } else {
                v == 0.0
            }
        })
}

pub fn is_zero(a: &Matrix) -> bool {
    a.iter().all(|&v| v == 0.0)
}

/// Singular values of `a`, largest first.
pub fn singular_values(a: &Matrix) -> Option<Vec<f64>> {
    let svd = a.clone().try_svd(false, false, f64::EPSILON, 0)?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Some(s)
}

/// 2-norm condition number; `inf` for exactly singular matrices.
pub fn condition_number(a: &Matrix) -> f64 {
    match singular_values(a) {
        Some(s) => {
            let (max, min) = (s[0], s[s.len() - 1]);
            if min == 0.0 {
                f64::INFINITY
            } else {
                max / min
            }
        }
        None => f64::INFINITY,
    }
}
