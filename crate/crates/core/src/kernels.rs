//! Poisson kernels of `Δ` and `Δ²` on `R⁴_+`, kernel extensions of
//! boundary data, and the self-consistency checks of the log-kernel
//! representation against the classified solutions.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::closed_forms::{halfspace_solution, HalfSpaceExtremalParams};
use crate::diffops::{bilaplacian, boundary_normal, laplacian, NormalKind, StencilConfig};
use crate::quadrature::{compactified_rule_at, integrate, ConvolutionConfig, Density, Domain, LogKernelField, Refined};
use crate::residuals::{Samples, SystemResidual};
use crate::vector::{dist_sq, norm};
use crate::{sphere_area, Error, Result, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `(2/|S³|) t / (|x-y|² + t²)²`.
    Harmonic,
    /// `(4/π²) t^p / (|x-y|² + t²)³`.
    Biharmonic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub t_power: i32,
    pub normalization: f64,
}

impl KernelSpec {
    pub fn harmonic() -> Self {
        Self {
            kind: KernelKind::Harmonic,
            t_power: 1,
            normalization: 2.0 / sphere_area(3),
        }
    }

    /// The biharmonic kernel with `t³` in the numerator, which integrates to
    /// one for every `t`.
    pub fn biharmonic() -> Self {
        Self::biharmonic_with_power(3)
    }

    /// The biharmonic kernel exactly as printed in the source display, with a
    /// single power of `t`. Its `y`-integral is `t⁻²`.
    pub fn biharmonic_literal() -> Self {
        Self::biharmonic_with_power(1)
    }

    pub fn biharmonic_with_power(t_power: i32) -> Self {
        Self {
            kind: KernelKind::Biharmonic,
            t_power,
            normalization: 4.0 / (PI * PI),
        }
    }

    fn radial(&self, r2: f64, t: f64) -> f64 {
        let s = r2 + t * t;
        match self.kind {
            KernelKind::Harmonic => self.normalization * t / (s * s),
            KernelKind::Biharmonic => self.normalization * libm::pow(t, self.t_power as f64) / (s * s * s),
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::Domain("kernels need t > 0".into()));
    }
    Ok(())
}

/// `K(x, t; y)` for `x, y ∈ R³`.
pub fn kernel_eval(spec: &KernelSpec, x: &[f64], t: f64, y: &[f64]) -> Result<f64> {
    check_t(t)?;
    if x.len() != 3 || y.len() != 3 {
        return Err(Error::Domain("kernels live on R⁴_+ (x, y ∈ R³)".into()));
    }
    Ok(spec.radial(dist_sq(x, y), t))
}

/// `∫_{R³} K(0, t; y) dy` with a compactified rule of angular resolution
/// `res` (radial `2·res`) at scale `t`.
pub fn normalization_check(spec: &KernelSpec, t: f64, res: usize) -> Result<f64> {
    check_t(t)?;
    let rule = compactified_rule_at(Domain::Euclidean(3), 2 * res, res, None, t)?;
    integrate(&rule, |y| Ok(spec.radial(crate::vector::norm_sq(y), t)))
}

/// Default angular resolution of [`apply_kernel`].
pub const KERNEL_RES: usize = 24;

/// `∫_{R³} K(x, t; y) g(y) dy`, from a compactified rule recentred at `x`
/// with scale `t` (resolutions `res` and `2·res`, radial twice that).
/// Fails with a convergence error when the two differ by more than `tol`
/// relative to `max(1, |value|)`.
pub fn apply_kernel(
    spec: &KernelSpec,
    data: &dyn Fn(&[f64]) -> Result<f64>,
    x: &[f64],
    t: f64,
    res: usize,
    tol: f64,
) -> Result<Refined> {
    check_t(t)?;
    if x.len() != 3 {
        return Err(Error::Domain("kernels live on R⁴_+ (x ∈ R³)".into()));
    }
    let at = |res: usize| -> Result<f64> {
        let rule = compactified_rule_at(Domain::Euclidean(3), 2 * res, res, Some(x), t)?;
        integrate(&rule, |y| Ok(spec.radial(dist_sq(x, y), t) * data(y)?))
    };
    let coarse = at(res)?;
    let fine = at(2 * res)?;
    if !(libm::fabs(fine - coarse) <= tol * libm::fabs(fine).max(1.0)) {
        return Err(Error::Convergence {
            what: "kernel extension".into(),
            coarse,
            fine,
        });
    }
    Ok(Refined {
        value: fine,
        coarse,
        fine,
    })
}

/// `e^{3u_{a,λ}(y,0)} = (2λ/(λ² + |y-a|²))³` as a convolution density.
pub fn bubble_density(a: &[f64], lambda: f64) -> Density {
    let c = a.to_vec();
    Density::new(a.len(), a, lambda, move |y: &[f64]| {
        let q = 2.0 * lambda / (lambda * lambda + dist_sq(y, &c));
        q * q * q
    })
}

/// Residuals of the linear system solved by the log-kernel field, plus
/// the intermediate identity for `Δv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma31Report {
    /// `Δ²v` in the interior; `dt_laplacian`: `∂_tΔv − 4f`; `neumann`: `∂_t v`.
    pub system: SystemResidual,
    /// `max |Δv_FD − (−4/|S³|) ∫ f/(|x-y|² + t²)|` over `identity_points`.
    pub laplacian_identity_gap: f64,
}

/// Builds `v` from `density` and evaluates `Δ²v = 0`, `∂_tΔv = 4f`,
/// `∂_t v = 0` at the samples, and the `Δv` identity at `identity_points`.
pub fn lemma31_system_check(
    density: &Density,
    samples: &Samples,
    identity_points: &[Vec<f64>],
    cfg: &StencilConfig,
    conv: &ConvolutionConfig,
) -> Result<Lemma31Report> {
    let n = density.n();
    let v = LogKernelField::new(density.clone(), conv)?;
    let mut interior: f64 = 0.0;
    for p in &samples.interior {
        interior = interior.max(libm::fabs(bilaplacian(&v, p, cfg)?));
    }
    let mut dt_lap: f64 = 0.0;
    let mut neumann: f64 = 0.0;
    for p in &samples.boundary {
        let f = density.eval(&p[..n]);
        dt_lap = dt_lap.max(libm::fabs(boundary_normal(&v, p, NormalKind::DtDeltaU, cfg)? - 4.0 * f));
        neumann = neumann.max(libm::fabs(boundary_normal(&v, p, NormalKind::DtU, cfg)?));
    }
    let mut identity: f64 = 0.0;
    for p in identity_points {
        let lap = laplacian(&v, p, cfg)?;
        let conv = v.convolve_with(&p[..n], p[n], &|s| 1.0 / s)?;
        identity = identity.max(libm::fabs(lap + 4.0 / sphere_area(n) * conv));
    }
    Ok(Lemma31Report {
        system: SystemResidual {
            interior_sup: interior,
            boundary_sups: alloc::vec![
                (String::from("dt_laplacian"), dt_lap),
                (String::from("neumann"), neumann)
            ],
            interior_samples: samples.interior.len(),
            boundary_samples: samples.boundary.len(),
        },
        laplacian_identity_gap: identity,
    })
}

/// One target of [`corollary_selfconsistency`].
#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryTarget {
    pub point: Vec<f64>,
    pub u: f64,
    pub v: f64,
}

/// The classified solution `u_{a,λ}` against the log-kernel field `v` of its
/// own boundary density.
#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryReport {
    /// `max |u − v|` over all targets.
    pub worst_gap: f64,
    /// `u(0,0) = log(2λ/(λ² + |a|²))`, the value `u − v` must take
    /// everywhere because `v(0,0) = 0` by construction.
    pub predicted_offset: f64,
    /// Mean of `u − v` over the targets.
    pub fitted_offset: f64,
    /// `max |u − v − predicted_offset|`.
    pub worst_gap_after_offset: f64,
    /// `max |u(x,0) − (1/|S³|)∫ e^{3u} log(|y|/|x−y|) dy|` over boundary
    /// targets, i.e. the boundary equation taken literally with `c₀ = 0`.
    pub boundary_fixed_point_gap: Option<f64>,
    /// Mean over interior targets of
    /// `−(4/|S³|)∫ e^{3u}/(|x−y|²+t²) dy − Δu`.
    pub c1_estimate: Option<f64>,
    pub targets: Vec<CorollaryTarget>,
}

pub fn corollary_selfconsistency(
    a: &[f64],
    lambda: f64,
    targets: &[Vec<f64>],
    cfg: &StencilConfig,
    conv: &ConvolutionConfig,
) -> Result<CorollaryReport> {
    if !(lambda > 0.0) {
        return Err(Error::Domain("lambda must be > 0".into()));
    }
    let n = a.len();
    let u = halfspace_solution(HalfSpaceExtremalParams::new(a, lambda, 0.0))?;
    let density = bubble_density(a, lambda);
    let v = LogKernelField::new(density, conv)?;
    let predicted = libm::log(2.0 * lambda / (lambda * lambda + crate::vector::norm_sq(a)));
    let mut out = Vec::with_capacity(targets.len());
    let (mut worst, mut worst_off, mut sum) = (0.0f64, 0.0f64, 0.0);
    let mut fixed: Option<f64> = None;
    let (mut c1_sum, mut c1_count) = (0.0, 0usize);
    for p in targets {
        if p.len() != n + 1 {
            return Err(Error::Precondition("target dimension".into()));
        }
        let uv = u.eval(p)?;
        let vv = v.eval(p)?;
        worst = worst.max(libm::fabs(uv - vv));
        worst_off = worst_off.max(libm::fabs(uv - vv - predicted));
        sum += uv - vv;
        if p[n] == 0.0 {
            let g = libm::fabs(uv - vv / 2.0);
            fixed = Some(fixed.map_or(g, |f| f.max(g)));
        } else if norm(p) <= 10.0 {
            let rep = -4.0 / sphere_area(n) * v.convolve_with(&p[..n], p[n], &|s| 1.0 / s)?;
            c1_sum += rep - laplacian(&u, p, cfg)?;
            c1_count += 1;
        }
        out.push(CorollaryTarget {
            point: p.clone(),
            u: uv,
            v: vv,
        });
    }
    Ok(CorollaryReport {
        worst_gap: worst,
        predicted_offset: predicted,
        fitted_offset: sum / targets.len().max(1) as f64,
        worst_gap_after_offset: worst_off,
        boundary_fixed_point_gap: fixed,
        c1_estimate: (c1_count > 0).then(|| c1_sum / c1_count as f64),
        targets: out,
    })
}
