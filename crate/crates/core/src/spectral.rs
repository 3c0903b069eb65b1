//! Zonal Gegenbauer solver for the harmonic and biharmonic Neumann problems
//! on `B^{n+1}`, independent of the closed forms it is compared against.
//!
//! A zonal biharmonic function is written `Σ (a_k r^k + b_k r^{k+2}) C̃_k(s)`
//! with `s = ⟨axis, ξ⟩/|ξ|` and `C̃_k` the Gegenbauer polynomials of index
//! `(n-1)/2`, orthonormal for the weight `(1-s²)^{(n-2)/2}` on `[-1, 1]`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::closed_forms::{biharmonic_extension_z, boundary_extremal, harmonic_extension_z};
use crate::quadrature::gauss_jacobi_symmetric;
use crate::vector::{dot, norm, orthonormal_complement};
use crate::{Chart, Error, Result, ScalarField};

/// Gegenbauer index `(n-1)/2` of zonal harmonics on `S^n`.
pub fn gegenbauer_index(n: usize) -> f64 {
    (n as f64 - 1.0) / 2.0
}

/// `C_k^{λ}(s)` by the three-term recurrence. For `λ = 0` this returns the
/// Chebyshev polynomial `T_k(s)`, the usual limit convention.
pub fn gegenbauer_eval(k: usize, lambda: f64, s: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = if lambda == 0.0 { s } else { 2.0 * lambda * s };
    for j in 1..k {
        let jf = j as f64;
        let next = if lambda == 0.0 {
            2.0 * s * cur - prev
        } else {
            (2.0 * (jf + lambda) * s * cur - (jf + 2.0 * lambda - 1.0) * prev) / (jf + 1.0)
        };
        prev = cur;
        cur = next;
    }
    cur
}

/// `∫_{-1}^{1} C_k^λ(s)² (1-s²)^{λ-1/2} ds`.
pub fn gegenbauer_norm_sq(k: usize, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { PI } else { PI / 2.0 };
    }
    let kf = k as f64;
    PI * libm::exp(
        (1.0 - 2.0 * lambda) * core::f64::consts::LN_2 + libm::lgamma(kf + 2.0 * lambda)
            - libm::lgamma(kf + 1.0)
            - 2.0 * libm::lgamma(lambda),
    ) / (kf + lambda)
}

/// Orthonormal `C̃_k(s)` for index `λ`.
pub fn gegenbauer_normalized(k: usize, lambda: f64, s: f64) -> f64 {
    gegenbauer_eval(k, lambda, s) / libm::sqrt(gegenbauer_norm_sq(k, lambda))
}

/// All `C̃_0(s) … C̃_kmax(s)` in one recurrence pass.
pub fn gegenbauer_normalized_all(kmax: usize, lambda: f64, s: f64, out: &mut Vec<f64>) {
    out.clear();
    let mut prev = 1.0;
    out.push(prev);
    if kmax == 0 {
        return;
    }
    let mut cur = if lambda == 0.0 { s } else { 2.0 * lambda * s };
    out.push(cur);
    for j in 1..kmax {
        let jf = j as f64;
        let next = if lambda == 0.0 {
            2.0 * s * cur - prev
        } else {
            (2.0 * (jf + lambda) * s * cur - (jf + 2.0 * lambda - 1.0) * prev) / (jf + 1.0)
        };
        prev = cur;
        cur = next;
        out.push(cur);
    }
    for (k, c) in out.iter_mut().enumerate() {
        *c /= libm::sqrt(gegenbauer_norm_sq(k, lambda));
    }
}

/// Coefficients of zonal boundary data in the orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalExpansion {
    pub axis: Vec<f64>,
    pub n: usize,
    pub coeffs: Vec<f64>,
}

/// Largest spread along a latitude circle accepted as zonal.
pub const ZONAL_SPREAD_TOL: f64 = 1e-8;

/// Project sphere data zonal about `axis` onto `C̃_0 … C̃_kmax` with an
/// `m`-point Gauss–Jacobi rule in `s`.
pub fn zonal_project<F: ScalarField + ?Sized>(f: &F, axis: &[f64], kmax: usize, m: usize) -> Result<ZonalExpansion> {
    let d = f.dim();
    if d < 2 || axis.len() != d {
        return Err(Error::Domain("axis must match the sphere dimension".into()));
    }
    let na = norm(axis);
    if !(na > 0.0) {
        return Err(Error::Domain("axis must be nonzero".into()));
    }
    let axis: Vec<f64> = axis.iter().map(|x| x / na).collect();
    let n = d - 1;
    let perp = orthonormal_complement(&axis);
    let point = |s: f64, dir: &[f64]| -> Vec<f64> {
        let c = libm::sqrt((1.0 - s * s).max(0.0));
        axis.iter().zip(dir).map(|(a, p)| s * a + c * p).collect()
    };

    // Latitude-circle check: several directions in the orthogonal complement.
    let mut dirs: Vec<Vec<f64>> = perp.clone();
    if perp.len() >= 2 {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        dirs.push(perp[0].iter().zip(&perp[1]).map(|(x, y)| h * (x - y)).collect());
        for p in &perp {
            dirs.push(p.iter().map(|x| -x).collect());
        }
    } else {
        dirs.push(perp[0].iter().map(|x| -x).collect());
    }
    let mut spread: f64 = 0.0;
    for s in [-0.71, -0.2, 0.13, 0.55, 0.9] {
        let vals: Vec<f64> = dirs.iter().map(|dir| f.eval(&point(s, dir))).collect::<Result<_>>()?;
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        spread = spread.max((hi - lo) / hi.abs().max(lo.abs()).max(1.0));
    }
    if spread > ZONAL_SPREAD_TOL {
        return Err(Error::NonZonal { spread });
    }

    let lambda = gegenbauer_index(n);
    let (nodes, weights) = gauss_jacobi_symmetric(m, lambda - 0.5);
    let mut coeffs = alloc::vec![0.0; kmax + 1];
    let mut basis = Vec::with_capacity(kmax + 1);
    for (s, w) in nodes.iter().zip(&weights) {
        let fv = f.eval(&point(*s, &perp[0]))?;
        gegenbauer_normalized_all(kmax, lambda, *s, &mut basis);
        for (c, b) in coeffs.iter_mut().zip(&basis) {
            *c += w * fv * b;
        }
    }
    Ok(ZonalExpansion { axis, n, coeffs })
}

/// One separated mode `(a_k r^k + b_k r^{k+2}) C̃_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSolution {
    pub k: usize,
    pub a: f64,
    pub b: f64,
}

/// Solve `a_k + b_k = f_k`, `k a_k + (k+2) b_k = β f_k` for every mode.
pub fn solve_modes(expansion: &ZonalExpansion, beta: f64) -> Vec<ModeSolution> {
    expansion
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let kf = k as f64;
            ModeSolution {
                k,
                a: (kf + 2.0 - beta) * f / 2.0,
                b: (beta - kf) * f / 2.0,
            }
        })
        .collect()
}

/// Harmonic modes: `a_k = f_k`, `b_k = 0`.
pub fn harmonic_modes(expansion: &ZonalExpansion) -> Vec<ModeSolution> {
    expansion
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, &f)| ModeSolution { k, a: f, b: 0.0 })
        .collect()
}

/// The ball field `Σ (a_k r^k + b_k r^{k+2}) C̃_k(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalField {
    axis: Vec<f64>,
    n: usize,
    modes: Vec<ModeSolution>,
    /// `1/‖C_k‖`, cached because the norms cost three `lgamma` calls each.
    inv_norms: Vec<f64>,
}

pub fn reconstruct(modes: Vec<ModeSolution>, axis: &[f64], n: usize) -> Result<ZonalField> {
    if axis.len() != n + 1 {
        return Err(Error::Domain("axis must have n+1 components".into()));
    }
    let na = norm(axis);
    if !(na > 0.0) {
        return Err(Error::Domain("axis must be nonzero".into()));
    }
    if modes.iter().enumerate().any(|(j, m)| m.k != j) {
        return Err(Error::Domain("modes must be listed in order k = 0, 1, …".into()));
    }
    let lambda = gegenbauer_index(n);
    let inv_norms = modes.iter().map(|m| 1.0 / libm::sqrt(gegenbauer_norm_sq(m.k, lambda))).collect();
    Ok(ZonalField {
        axis: axis.iter().map(|x| x / na).collect(),
        n,
        modes,
        inv_norms,
    })
}

impl ZonalField {
    pub fn modes(&self) -> &[ModeSolution] {
        &self.modes
    }

    fn polar(&self, p: &[f64]) -> (f64, f64) {
        let r = norm(p);
        let s = if r > 0.0 { (dot(&self.axis, p) / r).clamp(-1.0, 1.0) } else { 1.0 };
        (r, s)
    }

    /// `Σ term(m, r) r^k C̃_k(s)`; modes are stored in order `k = 0, 1, …`.
    fn sum(&self, p: &[f64], term: impl Fn(&ModeSolution, f64) -> f64) -> f64 {
        let (r, s) = self.polar(p);
        let lambda = gegenbauer_index(self.n);
        let (mut prev, mut cur) = (0.0, 1.0);
        let mut rk = 1.0;
        let mut acc = crate::sum::NeumaierSum::new();
        for (j, (m, inv)) in self.modes.iter().zip(&self.inv_norms).enumerate() {
            if j == 1 {
                (prev, cur) = (cur, if lambda == 0.0 { s } else { 2.0 * lambda * s });
            } else if j > 1 {
                let jf = (j - 1) as f64;
                let next = if lambda == 0.0 {
                    2.0 * s * cur - prev
                } else {
                    (2.0 * (jf + lambda) * s * cur - (jf + 2.0 * lambda - 1.0) * prev) / (jf + 1.0)
                };
                (prev, cur) = (cur, next);
            }
            acc.add(term(m, r) * rk * cur * inv);
            rk *= r;
        }
        acc.sum()
    }

    /// Radial derivative at `|ξ| = 1`, from the modes.
    pub fn normal_derivative(&self, xi: &[f64]) -> f64 {
        self.sum(xi, |m, _| m.k as f64 * m.a + (m.k as f64 + 2.0) * m.b)
    }

    /// `Δv` from `Δ(r^{k+2} Y_k) = 2(2k+n+1) r^k Y_k`.
    pub fn laplacian(&self, p: &[f64]) -> f64 {
        let d = self.n as f64 + 1.0;
        self.sum(p, |m, _| 2.0 * (2.0 * m.k as f64 + d) * m.b)
    }
}

impl ScalarField for ZonalField {
    fn dim(&self) -> usize {
        self.n + 1
    }
    fn chart(&self) -> Chart {
        Chart::Ball
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        Ok(self.sum(p, |m, r| m.a + m.b * r * r))
    }
    fn label(&self) -> &str {
        "v"
    }
}

/// Oracle versus closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralComparison {
    /// Sup gap to the biharmonic extension; `None` when `n < 3`.
    pub biharmonic_gap: Option<f64>,
    /// Sup gap to the harmonic extension.
    pub harmonic_gap: f64,
    /// `|z₀|^{kmax+1} / (1 - |z₀|)`.
    pub tail_bound: f64,
    /// Whether the tail bound exceeds the requested tolerance.
    pub truncation_warning: bool,
}

/// Default truncation degree.
pub const DEFAULT_KMAX: usize = 40;

/// Sup over `samples` of the oracle/closed-form gap for the order-4
/// (Neumann coefficient `-(n-3)/2`) and order-2 extremals with center `z0`.
pub fn compare_closed_form(z0: &[f64], n: usize, kmax: usize, samples: &[Vec<f64>], tol: f64) -> Result<SpectralComparison> {
    if z0.len() != n + 1 {
        return Err(Error::Domain("z0 must have n+1 components".into()));
    }
    let rz = norm(z0);
    let axis = if rz > 0.0 { z0.to_vec() } else { crate::vector::unit(n + 1, 0) };
    let m = 2 * kmax + 32;
    let sup_gap = |oracle: &ZonalField, closed: &dyn ScalarField| -> Result<f64> {
        let mut g: f64 = 0.0;
        for p in samples {
            g = g.max(libm::fabs(oracle.eval(p)? - closed.eval(p)?));
        }
        Ok(g)
    };
    let biharmonic_gap = if n >= 3 {
        let f = boundary_extremal(4, n, z0)?;
        let beta = -(n as f64 - 3.0) / 2.0;
        let oracle = reconstruct(solve_modes(&zonal_project(&f, &axis, kmax, m)?, beta), &axis, n)?;
        Some(sup_gap(&oracle, &biharmonic_extension_z(n, z0)?)?)
    } else {
        None
    };
    let f = boundary_extremal(2, n, z0)?;
    let oracle = reconstruct(harmonic_modes(&zonal_project(&f, &axis, kmax, m)?), &axis, n)?;
    let harmonic_gap = sup_gap(&oracle, &harmonic_extension_z(n, z0)?)?;
    let tail_bound = libm::pow(rz, kmax as f64 + 1.0) / (1.0 - rz);
    Ok(SpectralComparison {
        biharmonic_gap,
        harmonic_gap,
        tail_bound,
        truncation_warning: tail_bound > tol,
    })
}
