//! Small helpers on `&[f64]` vectors. Dimensions are runtime values.

use alloc::vec::Vec;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(norm_sq(a))
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Unit vector `e_i` in `R^dim`.
pub fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut e = alloc::vec![0.0; dim];
    e[i] = 1.0;
    e
}

/// Orthonormal basis of the complement of the unit vector `axis`,
/// obtained by Gram–Schmidt against the standard basis.
pub fn orthonormal_complement(axis: &[f64]) -> Vec<Vec<f64>> {
    let d = axis.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d.saturating_sub(1));
    for i in 0..d {
        if basis.len() + 1 == d {
            break;
        }
        let mut v = unit(d, i);
        let p = dot(&v, axis);
        for (vk, ak) in v.iter_mut().zip(axis) {
            *vk -= p * ak;
        }
        for b in &basis {
            let p = dot(&v, b);
            for (vk, bk) in v.iter_mut().zip(b) {
                *vk -= p * bk;
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            basis.push(v.iter().map(|x| x / nv).collect());
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let axis = [0.6, 0.0, 0.8, 0.0];
        let b = orthonormal_complement(&axis);
        assert_eq!(b.len(), 3);
        for (i, u) in b.iter().enumerate() {
            assert!(dot(u, &axis).abs() < 1e-14);
            assert!((norm(u) - 1.0).abs() < 1e-14);
            for w in &b[i + 1..] {
                assert!(dot(u, w).abs() < 1e-14);
            }
        }
    }
}
