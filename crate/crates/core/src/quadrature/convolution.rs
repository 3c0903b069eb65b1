//! Convolutions of a density on `R^n` with kernels that are singular (or
//! sharply peaked) at `y = x`, and the log-kernel representation built on
//! them.
//!
//! The domain is split by the partition of unity `χ(|y-x|/ρ)`,
//! `χ(u) = exp(-u^6)`: the near part is integrated in spherical coordinates
//! about `x` with radii graded as `r ∝ s^q` (which tames `r^{n-1} log r`),
//! the far part by a compactified rule about the density's center. Both
//! pieces are analytic away from `y = x`, so Gauss rules converge fast.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{compactified_rule_at, gauss_legendre_on, sphere_rule, Domain, ProductRule, QuadRule, Rule};
use crate::field::{Chart, ScalarField};
use crate::sum::NeumaierSum;
use crate::{sphere_area, Error, Result};

type DensityFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A density on `R^n` together with the location and length scale of its
/// bulk, which the far-field rule is adapted to.
#[derive(Clone)]
pub struct Density {
    f: Arc<DensityFn>,
    n: usize,
    center: Vec<f64>,
    scale: f64,
}

impl core::fmt::Debug for Density {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Density")
            .field("n", &self.n)
            .field("center", &self.center)
            .field("scale", &self.scale)
            .finish()
    }
}

impl Density {
    pub fn new<F>(n: usize, center: &[f64], scale: f64, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        assert_eq!(center.len(), n, "density center dimension");
        assert!(scale > 0.0, "density scale must be positive");
        Self {
            f: Arc::new(f),
            n,
            center: center.to_vec(),
            scale,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    pub fn eval(&self, y: &[f64]) -> f64 {
        (self.f)(y)
    }

    /// `κ·f`, same support data.
    pub fn scaled(&self, kappa: f64) -> Self {
        let f = self.f.clone();
        Self {
            f: Arc::new(move |y: &[f64]| kappa * f(y)),
            n: self.n,
            center: self.center.clone(),
            scale: self.scale,
        }
    }
}

/// Resolutions and split radius for [`convolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionConfig {
    /// Split radius `ρ`.
    pub rho: f64,
    /// Radial grading exponent `q` of the near field.
    pub grading: u32,
    pub near_radial: usize,
    pub near_sphere: usize,
    pub far_radial: usize,
    pub far_sphere: usize,
    /// Relative coarse/fine tolerance of [`log_kernel_integrate`].
    pub refine_tol: f64,
}

impl Default for ConvolutionConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            grading: 4,
            near_radial: 64,
            near_sphere: 16,
            far_radial: 128,
            far_sphere: 24,
            refine_tol: 1e-6,
        }
    }
}

impl ConvolutionConfig {
    /// All resolutions scaled by 3/2.
    pub fn refined(&self) -> Self {
        let up = |m: usize| m + m / 2;
        Self {
            near_radial: up(self.near_radial),
            near_sphere: up(self.near_sphere),
            far_radial: up(self.far_radial),
            far_sphere: up(self.far_sphere),
            ..*self
        }
    }
}

/// Exponent of the cutoff `χ(u) = exp(-u^P)`.
const CUTOFF_POWER: f64 = 6.0;
/// `χ` is below `e^{-40}` beyond this `u`.
fn cutoff_reach() -> f64 {
    libm::pow(40.0, 1.0 / CUTOFF_POWER)
}

/// Analytic cutoff, 1 at 0 and negligible past [`cutoff_reach`]; `1 - χ`
/// vanishes to order `P` at 0, which keeps the far integrand smooth at `x`.
fn chi(u: f64) -> f64 {
    if u >= cutoff_reach() {
        return 0.0;
    }
    libm::exp(-libm::pow(u, CUTOFF_POWER))
}

/// Prebuilt rules for one configuration.
#[derive(Debug, Clone)]
struct Plan {
    cfg: ConvolutionConfig,
    /// `(r, weight incl. r^{n-1} dr)` on the support of `χ`.
    near_radial: Vec<(f64, f64)>,
    near_dirs: QuadRule,
    far: ProductRule,
}

impl Plan {
    fn new(density: &Density, cfg: &ConvolutionConfig) -> Result<Self> {
        let n = density.n;
        if !(cfg.rho > 0.0) || cfg.grading < 1 {
            return Err(Error::Precondition("split radius and grading must be positive".into()));
        }
        let q = cfg.grading as f64;
        let (s, w) = gauss_legendre_on(cfg.near_radial, 0.0, 1.0);
        let near_radial = s
            .iter()
            .zip(&w)
            .map(|(s, w)| {
                let r_max = cfg.rho * cutoff_reach();
                let r = r_max * libm::pow(*s, q);
                let dr = r_max * q * libm::pow(*s, q - 1.0);
                (r, w * dr * libm::pow(r, (n - 1) as f64))
            })
            .collect();
        Ok(Self {
            cfg: *cfg,
            near_radial,
            near_dirs: sphere_rule(n - 1, cfg.near_sphere),
            far: compactified_rule_at(
                Domain::Euclidean(n),
                cfg.far_radial,
                cfg.far_sphere,
                Some(&density.center),
                density.scale,
            )?,
        })
    }

    fn convolve(&self, density: &Density, x: &[f64], kernel: &dyn Fn(f64) -> f64) -> Result<f64> {
        let n = density.n;
        if x.len() != n {
            return Err(Error::Precondition("target dimension does not match the density".into()));
        }
        let rho = self.cfg.rho;
        let mut acc = NeumaierSum::new();
        let mut y = vec![0.0; n];
        for &(r, wr) in &self.near_radial {
            let k = kernel(r * r);
            let c = chi(r / rho);
            if c == 0.0 {
                continue;
            }
            for (theta, wt) in self.near_dirs.nodes().zip(self.near_dirs.weights()) {
                for i in 0..n {
                    y[i] = x[i] + r * theta[i];
                }
                acc.add(wr * wt * c * k * density.eval(&y));
            }
        }
        self.far.try_for_each(&mut |y, w| {
            let d2 = crate::vector::dist_sq(y, x);
            let c = 1.0 - chi(libm::sqrt(d2) / rho);
            if c != 0.0 {
                acc.add(w * c * kernel(d2) * density.eval(y));
            }
            Ok(())
        })?;
        let v = acc.sum();
        if !v.is_finite() {
            return Err(Error::Convergence {
                what: "convolution".into(),
                coarse: v,
                fine: v,
            });
        }
        Ok(v)
    }
}

/// `∫_{R^n} f(y) K(|x-y|²) dy` for a kernel singular at most like
/// `log|x-y|` or `|x-y|^{-(n-1)}`.
pub fn convolve(density: &Density, x: &[f64], kernel: &dyn Fn(f64) -> f64, cfg: &ConvolutionConfig) -> Result<f64> {
    Plan::new(density, cfg)?.convolve(density, x, kernel)
}

/// A value with the coarse/fine pair it was accepted from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub value: f64,
    pub coarse: f64,
    pub fine: f64,
}

impl Refined {
    pub fn gap(&self) -> f64 {
        libm::fabs(self.fine - self.coarse)
    }
}

/// The log-kernel representation
/// `v(x,t) = (1/|S^n|) ∫ f(y) log(|y|² / (|x-y|² + t²)) dy`
/// on `R^{n+1}_+`, with one fixed quadrature plan so that `v` is a smooth
/// function of `(x, t)` and can be differentiated by finite differences.
#[derive(Debug, Clone)]
pub struct LogKernelField {
    density: Density,
    plan: Plan,
    c_f: f64,
    norm: f64,
}

impl LogKernelField {
    pub fn new(density: Density, cfg: &ConvolutionConfig) -> Result<Self> {
        let plan = Plan::new(&density, cfg)?;
        let origin = vec![0.0; density.n];
        let c_f = plan.convolve(&density, &origin, &|r2| libm::log(r2))?;
        let norm = 1.0 / sphere_area(density.n);
        Ok(Self {
            density,
            plan,
            c_f,
            norm,
        })
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn config(&self) -> &ConvolutionConfig {
        &self.plan.cfg
    }

    /// `∫ f(y) log|y|² dy`.
    pub fn log_moment(&self) -> f64 {
        self.c_f
    }

    /// `∫ f(y) K(|x-y|² + t²) dy` with this field's plan.
    pub fn convolve_with(&self, x: &[f64], t: f64, kernel: &dyn Fn(f64) -> f64) -> Result<f64> {
        let t2 = t * t;
        self.plan.convolve(&self.density, x, &|r2| kernel(r2 + t2))
    }
}

impl ScalarField for LogKernelField {
    fn dim(&self) -> usize {
        self.density.n + 1
    }
    fn chart(&self) -> Chart {
        Chart::HalfSpace
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        let n = self.density.n;
        if p.len() != n + 1 {
            return Err(Error::Precondition("point dimension".into()));
        }
        let conv = self.convolve_with(&p[..n], p[n], &|s| libm::log(s))?;
        Ok(self.norm * (self.c_f - conv))
    }
    fn label(&self) -> &str {
        "v"
    }
}

/// The log-kernel representation at one target, accepted only if the
/// configured and the refined resolutions agree to `cfg.refine_tol`
/// (relative to `max(1, |value|)`).
pub fn log_kernel_integrate(density: &Density, target: &[f64], cfg: &ConvolutionConfig) -> Result<Refined> {
    let coarse = LogKernelField::new(density.clone(), cfg)?.eval(target)?;
    let fine = LogKernelField::new(density.clone(), &cfg.refined())?.eval(target)?;
    let r = Refined {
        value: fine,
        coarse,
        fine,
    };
    if r.gap() > cfg.refine_tol * libm::fabs(fine).max(1.0) {
        return Err(Error::Convergence {
            what: "log-kernel integral".into(),
            coarse,
            fine,
        });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn bubble(lambda: f64) -> Density {
        // e^{3 u_{0,λ}(y,0)} = (2λ/(λ²+|y|²))³
        Density::new(3, &[0.0; 3], lambda, move |y| {
            libm::pow(2.0 * lambda / (lambda * lambda + crate::vector::norm_sq(y)), 3.0)
        })
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(chi(0.0), 1.0);
        assert!((chi(1.0) - libm::exp(-1.0)).abs() < 1e-15);
        assert!(chi(cutoff_reach() * 0.999) < 1e-17);
        assert_eq!(chi(cutoff_reach()), 0.0);
    }

    #[test]
    fn mass_of_the_bubble() {
        let d = bubble(1.0);
        let cfg = ConvolutionConfig::default();
        for x in [[0.0, 0.0, 0.0], [0.7, -0.2, 1.5]] {
            let m = convolve(&d, &x, &|_| 1.0, &cfg).unwrap();
            assert!((m - 2.0 * PI * PI).abs() < 1e-7, "{m}");
        }
    }

    #[test]
    fn newtonian_potential_of_a_gaussian() {
        // ∫ e^{-|y|²} / |x-y| dy = π^{3/2} erf(|x|)/|x|
        let d = Density::new(3, &[0.0; 3], 1.0, |y| libm::exp(-crate::vector::norm_sq(y)));
        let cfg = ConvolutionConfig::default();
        let x = [0.3, 0.4, 0.0];
        let v = convolve(&d, &x, &|r2| 1.0 / libm::sqrt(r2), &cfg).unwrap();
        let exact = libm::pow(PI, 1.5) * libm::erf(0.5) / 0.5;
        assert!((v - exact).abs() < 1e-9, "{v} {exact}");
    }

    #[test]
    fn log_field_vanishes_at_the_origin() {
        let v = LogKernelField::new(bubble(1.0), &ConvolutionConfig::default()).unwrap();
        assert!(v.eval(&[0.0; 4]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn log_field_reproduces_the_normalized_bubble() {
        // u_{0,2} has u(0,0) = 0, so it equals its own log-kernel field.
        let lam = 2.0;
        let v = LogKernelField::new(bubble(lam), &ConvolutionConfig::default()).unwrap();
        for p in [[0.0, 0.0, 0.0, 1.0], [1.0, 0.5, 0.0, 0.0], [0.3, -1.2, 2.0, 0.7]] {
            let x2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
            let d = (lam + p[3]) * (lam + p[3]) + x2;
            let u = libm::log(2.0 * lam / d) + 2.0 * p[3] * lam / d;
            let got = v.eval(&p).unwrap();
            assert!((got - u).abs() < 1e-6, "{p:?}: {got} vs {u}");
        }
    }

    #[test]
    fn refined_pair_is_reported() {
        let r = log_kernel_integrate(&bubble(2.0), &[0.0, 0.0, 0.0, 1.0], &ConvolutionConfig::default()).unwrap();
        assert!(r.gap() < 1e-8);
        let exact = libm::log(4.0 / 9.0) + 4.0 / 9.0;
        assert!((r.value - exact).abs() < 1e-8);
    }

    #[test]
    fn split_radius_does_not_matter() {
        let d = bubble(1.0);
        let p = [0.4, 0.0, -0.3, 0.2];
        let vals: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&rho| {
                let cfg = ConvolutionConfig {
                    rho,
                    ..Default::default()
                };
                LogKernelField::new(d.clone(), &cfg).unwrap().eval(&p).unwrap()
            })
            .collect();
        assert!((vals[0] - vals[1]).abs() < 1e-6 && (vals[2] - vals[1]).abs() < 1e-6, "{vals:?}");
    }
}
