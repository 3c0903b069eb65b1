//! Deterministic low-discrepancy sample sets (Halton sequences).

use alloc::vec::Vec;
use core::f64::consts::PI;

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u32) -> f64 {
    let b = b as u64;
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// The first `count` points of the `dim`-dimensional Halton sequence in
/// `[0,1)^dim`, skipping index 0.
pub fn halton(dim: usize, count: usize) -> Vec<Vec<f64>> {
    assert!(dim <= PRIMES.len(), "Halton dimension too large");
    (1..=count as u64)
        .map(|i| (0..dim).map(|k| radical_inverse(i, PRIMES[k])).collect())
        .collect()
}

/// Standard normal pair from two uniforms (Box–Muller).
fn gaussian(u1: f64, u2: f64) -> (f64, f64) {
    let r = libm::sqrt(-2.0 * libm::log(1.0 - u1));
    (r * libm::cos(2.0 * PI * u2), r * libm::sin(2.0 * PI * u2))
}

/// `count` points on `S^n ⊂ R^{n+1}` (normalized Gaussian Halton points).
pub fn sphere_points(n: usize, count: usize) -> Vec<Vec<f64>> {
    let d = n + 1;
    let m = d.div_ceil(2) * 2;
    halton(m, count)
        .into_iter()
        .map(|u| {
            let mut g = Vec::with_capacity(m);
            for k in (0..m).step_by(2) {
                let (a, b) = gaussian(u[k], u[k + 1]);
                g.push(a);
                g.push(b);
            }
            g.truncate(d);
            let r = crate::vector::norm(&g);
            g.iter().map(|x| x / r).collect()
        })
        .collect()
}

/// `count` interior points of `B^{n+1}` with `|ξ| ≤ 1 - clearance`.
pub fn ball_points(n: usize, count: usize, clearance: f64) -> Vec<Vec<f64>> {
    let d = n + 1;
    let dirs = sphere_points(n, count);
    let radial = halton(PRIMES.len(), count);
    dirs.into_iter()
        .zip(radial)
        .map(|(u, r)| {
            let rad = (1.0 - clearance) * libm::pow(r[PRIMES.len() - 1], 1.0 / d as f64);
            u.iter().map(|x| x * rad).collect()
        })
        .collect()
}

/// `count` points of the box `[-half, half]^n × [t_min, t_max]` in `R^{n+1}_+`.
pub fn halfspace_points(n: usize, count: usize, half: f64, t_min: f64, t_max: f64) -> Vec<Vec<f64>> {
    halton(n + 1, count)
        .into_iter()
        .map(|u| {
            let mut p: Vec<f64> = u[..n].iter().map(|s| half * (2.0 * s - 1.0)).collect();
            p.push(t_min + (t_max - t_min) * u[n]);
            p
        })
        .collect()
}

/// `count` boundary points `(x, 0)` with `x ∈ [-half, half]^n`.
pub fn boundary_points(n: usize, count: usize, half: f64) -> Vec<Vec<f64>> {
    halton(n, count)
        .into_iter()
        .map(|u| {
            let mut p: Vec<f64> = u.iter().map(|s| half * (2.0 * s - 1.0)).collect();
            p.push(0.0);
            p
        })
        .collect()
}
