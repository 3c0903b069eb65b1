//! Dense least squares by Householder QR.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Solution of `min ‖A c − b‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coeffs: Vec<f64>,
    /// `‖A c − b‖₂ / sqrt(rows)`.
    pub rms_residual: f64,
}

/// Least squares for a row-major `rows × cols` matrix.
///
/// Fails with [`Error::RankDeficient`] when a pivot of `R` falls below
/// `1e-12` times the largest column norm.
pub fn least_squares(a: &[f64], rows: usize, cols: usize, b: &[f64]) -> Result<LeastSquares> {
    if a.len() != rows * cols || b.len() != rows {
        return Err(Error::Precondition("least-squares dimensions".into()));
    }
    if rows < cols || cols == 0 {
        return Err(Error::RankDeficient);
    }
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    let at = |m: &Vec<f64>, i: usize, j: usize| m[i * cols + j];
    let scale = (0..cols)
        .map(|j| libm::sqrt((0..rows).map(|i| at(&m, i, j) * at(&m, i, j)).sum::<f64>()))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::RankDeficient);
    }
    let mut v = vec![0.0; rows];
    for k in 0..cols {
        let norm = libm::sqrt((k..rows).map(|i| at(&m, i, k) * at(&m, i, k)).sum::<f64>());
        if norm <= 1e-12 * scale {
            return Err(Error::RankDeficient);
        }
        let alpha = if at(&m, k, k) > 0.0 { -norm } else { norm };
        for i in k..rows {
            v[i] = at(&m, i, k);
        }
        v[k] -= alpha;
        let vnorm2: f64 = (k..rows).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..cols {
            let d: f64 = (k..rows).map(|i| v[i] * at(&m, i, j)).sum();
            let f = 2.0 * d / vnorm2;
            for i in k..rows {
                m[i * cols + j] -= f * v[i];
            }
        }
        let d: f64 = (k..rows).map(|i| v[i] * rhs[i]).sum();
        let f = 2.0 * d / vnorm2;
        for i in k..rows {
            rhs[i] -= f * v[i];
        }
    }
    let mut c = vec![0.0; cols];
    for k in (0..cols).rev() {
        let s: f64 = (k + 1..cols).map(|j| at(&m, k, j) * c[j]).sum();
        c[k] = (rhs[k] - s) / at(&m, k, k);
    }
    let res2: f64 = (0..rows)
        .map(|i| {
            let r: f64 = (0..cols).map(|j| a[i * cols + j] * c[j]).sum::<f64>() - b[i];
            r * r
        })
        .sum();
    Ok(LeastSquares {
        coeffs: c,
        rms_residual: libm::sqrt(res2 / rows as f64),
    })
}
