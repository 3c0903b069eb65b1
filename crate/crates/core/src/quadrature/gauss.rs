//! One-dimensional Gauss rules.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// Nodes and weights of the `m`-point Gauss rule for the weight
/// `(1 - s²)^a` on `[-1, 1]` (`a > -1`), nodes ascending.
///
/// Roots of the Jacobi polynomial `P_m^{(a,a)}` by Newton iteration from the
/// asymptotic angles `θ_i = π(i + 3/4 + a/2)/(m + a + 1/2)`, which are exact
/// for both Chebyshev weights.
pub fn gauss_jacobi_symmetric(m: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "Gauss rule needs at least one node");
    assert!(a > -1.0, "weight exponent must exceed -1");
    let mf = m as f64;
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    // w_i = Γ(m+a+1)² / (Γ(m+2a+1) m!) · 2^{2a+1} / ((1-z²) P'_m(z)²)
    let log_c = 2.0 * libm::lgamma(mf + a + 1.0) - libm::lgamma(mf + 2.0 * a + 1.0) - libm::lgamma(mf + 1.0)
        + (2.0 * a + 1.0) * core::f64::consts::LN_2;
    let c = libm::exp(log_c);
    for i in 0..m {
        let theta = PI * (i as f64 + 0.75 + a / 2.0) / (mf + a + 0.5);
        let mut z = libm::cos(theta);
        for _ in 0..100 {
            let (p, dp) = jacobi_with_derivative(m, a, z);
            let dz = p / dp;
            z -= dz;
            if libm::fabs(dz) <= 1e-16 * (1.0 + libm::fabs(z)) {
                break;
            }
        }
        let (_, dp) = jacobi_with_derivative(m, a, z);
        nodes.push(z);
        weights.push(c / ((1.0 - z * z) * dp * dp));
    }
    nodes.reverse();
    weights.reverse();
    // exact symmetry
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let s = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -s;
        nodes[j] = s;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_m^{(a,a)}(z), d/dz P_m^{(a,a)}(z))` by the three-term recurrence and
/// its derivative.
fn jacobi_with_derivative(m: usize, a: f64, z: f64) -> (f64, f64) {
    let (mut p1, mut d1) = ((1.0 + a) * z, 1.0 + a);
    let (mut p2, mut d2) = (1.0, 0.0);
    if m == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=m {
        let jf = j as f64;
        let (p3, d3) = (p2, d2);
        p2 = p1;
        d2 = d1;
        let temp = 2.0 * jf + 2.0 * a;
        let aa = 2.0 * jf * (jf + 2.0 * a) * (temp - 2.0);
        let b1 = (temp - 1.0) * temp * (temp - 2.0);
        let cc = 2.0 * (jf - 1.0 + a) * (jf - 1.0 + a) * temp;
        p1 = (b1 * z * p2 - cc * p3) / aa;
        d1 = (b1 * (p2 + z * d2) - cc * d3) / aa;
    }
    (p1, d1)
}

/// Gauss–Legendre nodes/weights on `[lo, hi]`.
pub fn gauss_legendre_on(m: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_jacobi_symmetric(m, 0.0);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    (
        x.iter().map(|s| mid + half * s).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(m: usize, a: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (x, w) = gauss_jacobi_symmetric(m, a);
        x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum()
    }

    #[test]
    fn legendre_low_orders() {
        let (x, w) = gauss_jacobi_symmetric(1, 0.0);
        assert_eq!(x, [0.0]);
        assert!((w[0] - 2.0).abs() < 1e-15);
        let (x, w) = gauss_jacobi_symmetric(2, 0.0);
        let r = 1.0 / libm::sqrt(3.0);
        assert!((x[0] + r).abs() < 1e-15 && (x[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
        assert!((integrate(3, 0.0, |x| x.powi(4)) - 0.4).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_limits_are_exact() {
        let m = 7;
        let (x, w) = gauss_jacobi_symmetric(m, -0.5);
        for (i, xi) in x.iter().enumerate() {
            let k = (m - 1 - i) as f64;
            assert!((xi - libm::cos(PI * (k + 0.5) / m as f64)).abs() < 1e-15);
            assert!((w[i] - PI / m as f64).abs() < 1e-14);
        }
        let (x, _) = gauss_jacobi_symmetric(m, 0.5);
        for (i, xi) in x.iter().enumerate() {
            let k = (m - i) as f64;
            assert!((xi - libm::cos(PI * k / (m as f64 + 1.0))).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_on_weighted_polynomials() {
        // ∫ s^{2k} (1-s²)^a ds = B(k + 1/2, a + 1)
        for &a in &[0.0, 0.5, 1.0, 1.5, 2.5, -0.5] {
            for m in [4usize, 9, 20, 64] {
                for k in 0..m {
                    let exact = libm::exp(
                        libm::lgamma(k as f64 + 0.5) + libm::lgamma(a + 1.0)
                            - libm::lgamma(k as f64 + a + 1.5),
                    );
                    let q = integrate(m, a, |s| libm::pow(s, 2.0 * k as f64));
                    assert!((q - exact).abs() < 1e-13 * exact.max(1.0), "a={a} m={m} k={k} err={}", q - exact);
                }
            }
        }
    }

    #[test]
    fn large_rules_stay_ordered_and_positive() {
        for &a in &[0.0, 0.5, 2.0] {
            let (x, w) = gauss_jacobi_symmetric(200, a);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            assert!(w.iter().all(|w| *w > 0.0));
        }
    }
}
