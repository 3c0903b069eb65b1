//! Residuals of the boundary-value systems on the ball and the half-space,
//! the Euler–Lagrange equation on `S³`, Pizzetti's formula, the quadratic
//! structure of `u - v` and the logarithmic lower bound.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::diffops::{
    bilaplacian, boundary_normal, laplacian, sphere_average, tangential_laplacian, NormalKind, StencilConfig,
};
use crate::field::SphereTrace;
use crate::functionals::log_integral_exp;
use crate::linalg::least_squares;
use crate::quadrature::{Domain, QuadRule, Rule};
use crate::vector::norm;
use crate::{Chart, Error, Result, ScalarField};

/// Sup norms of the interior equation and of each boundary condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemResidual {
    /// `max |Δ²·|` over the interior samples.
    pub interior_sup: f64,
    pub boundary_sups: Vec<(String, f64)>,
    pub interior_samples: usize,
    pub boundary_samples: usize,
}

impl SystemResidual {
    pub fn boundary(&self, name: &str) -> Option<f64> {
        self.boundary_sups.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Largest entry.
    pub fn max(&self) -> f64 {
        self.boundary_sups.iter().fold(self.interior_sup, |m, (_, v)| m.max(*v))
    }
}

/// Interior and boundary sample points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Samples {
    pub interior: Vec<Vec<f64>>,
    pub boundary: Vec<Vec<f64>>,
}

fn sup<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    let mut m: f64 = 0.0;
    for v in it {
        let v = libm::fabs(v?);
        if v.is_nan() {
            return Ok(f64::NAN);
        }
        m = m.max(v);
    }
    Ok(m)
}

/// `Δ²v = 0` in `B^{n+1}`, `ηv = βf` and `v = f` on `S^n`.
pub fn ball_system_residual<V, F>(v: &V, f: &F, beta: f64, samples: &Samples, cfg: &StencilConfig) -> Result<SystemResidual>
where
    V: ScalarField + ?Sized,
    F: ScalarField + ?Sized,
{
    if v.chart() != Chart::Ball || f.dim() != v.dim() {
        return Err(Error::ChartMismatch("ball system needs a ball field and sphere data".into()));
    }
    let interior = sup(samples.interior.iter().map(|p| bilaplacian(v, p, cfg)))?;
    let neumann = sup(samples.boundary.iter().map(|xi| {
        Ok(boundary_normal(v, xi, NormalKind::EtaV, cfg)? - beta * f.eval(xi)?)
    }))?;
    let dirichlet = sup(samples.boundary.iter().map(|xi| Ok(v.eval(xi)? - f.eval(xi)?)))?;
    Ok(SystemResidual {
        interior_sup: interior,
        boundary_sups: alloc::vec![("neumann".into(), neumann), ("dirichlet".into(), dirichlet)],
        interior_samples: samples.interior.len(),
        boundary_samples: samples.boundary.len(),
    })
}

/// Right-hand side of the nonlinear boundary condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    /// `4 e^{3u}` (`n = 3`).
    Exp3,
    /// `c u^{(n+3)/(n-3)}` (`n > 3`).
    Power { c: f64 },
}

/// `Δ²u = 0` in `R^{n+1}_+`, `∂_tΔu = RHS(u)` and `∂_t u = 0` at `t = 0`.
/// Boundary samples are points `(x, 0)`.
pub fn halfspace_system_residual<U: ScalarField + ?Sized>(
    u: &U,
    nonlinearity: Nonlinearity,
    samples: &Samples,
    cfg: &StencilConfig,
) -> Result<SystemResidual> {
    if u.chart() != Chart::HalfSpace {
        return Err(Error::ChartMismatch("half-space system needs a half-space field".into()));
    }
    let n = u.dim() - 1;
    let rhs = |val: f64| -> Result<f64> {
        match nonlinearity {
            Nonlinearity::Exp3 if n == 3 => Ok(4.0 * libm::exp(3.0 * val)),
            Nonlinearity::Power { c } if n > 3 => {
                let p = (n as f64 + 3.0) / (n as f64 - 3.0);
                Ok(c * libm::pow(val, p))
            }
            _ => Err(Error::Unsupported { order: 4, n }),
        }
    };
    let interior = sup(samples.interior.iter().map(|p| bilaplacian(u, p, cfg)))?;
    let nonlinear = sup(samples.boundary.iter().map(|p| {
        Ok(boundary_normal(u, p, NormalKind::DtDeltaU, cfg)? - rhs(u.eval(p)?)?)
    }))?;
    let neumann = sup(samples.boundary.iter().map(|p| boundary_normal(u, p, NormalKind::DtU, cfg)))?;
    Ok(SystemResidual {
        interior_sup: interior,
        boundary_sups: alloc::vec![("nonlinear".into(), nonlinear), ("neumann".into(), neumann)],
        interior_samples: samples.interior.len(),
        boundary_samples: samples.boundary.len(),
    })
}

/// Tolerances for the preconditions `Δ²v = 0` and `ηv = 0` of
/// [`euler_lagrange_s3_residual`].
pub const EL_PRECONDITION_TOL: f64 = 1e-5;

/// `sup |−η(Δv) − 2Δ̄v + 4 − 8π² e^{3v} / ∮e^{3v}|` over sphere samples, for
/// a biharmonic `v` on `B⁴` with `ηv = 0`.
///
/// The integral comes from `rule` (a rule on `S³`). `samples.interior` is
/// used for the biharmonicity precondition, `samples.boundary` for `ηv = 0`
/// and the residual itself.
pub fn euler_lagrange_s3_residual<V: ScalarField + ?Sized>(
    v: &V,
    samples: &Samples,
    rule: &QuadRule,
    cfg: &StencilConfig,
) -> Result<f64> {
    let v: &dyn ScalarField = &v;
    if v.chart() != Chart::Ball || v.dim() != 4 || rule.domain() != Domain::Sphere(3) {
        return Err(Error::ChartMismatch("the Euler–Lagrange residual is defined for ball fields on B⁴".into()));
    }
    let bi = sup(samples.interior.iter().map(|p| bilaplacian(v, p, cfg)))?;
    if !(bi <= EL_PRECONDITION_TOL) {
        return Err(Error::Precondition(alloc::format!("v is not biharmonic: sup |Δ²v| = {bi:e}")));
    }
    let eta = sup(samples.boundary.iter().map(|xi| boundary_normal(v, xi, NormalKind::EtaV, cfg)))?;
    if !(eta <= EL_PRECONDITION_TOL) {
        return Err(Error::Precondition(alloc::format!("ηv = 0 fails: sup |ηv| = {eta:e}")));
    }
    let log_int = log_integral_exp(rule, &mut |x| Ok(3.0 * v.eval(x)?))?;
    let trace = SphereTrace(v);
    sup(samples.boundary.iter().map(|xi| {
        let lhs = -boundary_normal(v, xi, NormalKind::EtaDeltaV, cfg)? - 2.0 * tangential_laplacian(&trace, xi, cfg)? + 4.0;
        let rhs = 8.0 * PI * PI * libm::exp(3.0 * v.eval(xi)? - log_int);
        Ok(lhs - rhs)
    }))
}

/// `|r²/(2d) Δw(X₀) − (avg_{∂B_r(X₀)} w − w(X₀))|` in `R^d`, exact for
/// biharmonic `w`.
pub fn pizzetti_gap<W: ScalarField + ?Sized>(
    w: &W,
    x0: &[f64],
    r: f64,
    rule: &QuadRule,
    cfg: &StencilConfig,
) -> Result<f64> {
    let d = w.dim() as f64;
    let avg = sphere_average(w, x0, r, rule)?;
    let lap = laplacian(w, x0, cfg)?;
    Ok(libm::fabs(r * r / (2.0 * d) * lap - (avg - w.eval(x0)?)))
}

/// `u − v ≈ c_* t² + Σ a_i (x_i − x_i⁰)² + c₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFit {
    pub c_star: f64,
    pub a_coeffs: Vec<f64>,
    /// Linear coefficients `b_i` of the unconstrained fit; `x_i⁰ = −b_i/(2a_i)`.
    pub linear: Vec<f64>,
    /// `x⁰`; components with `|a_i| < 1e-8` are set to zero.
    pub x0: Vec<f64>,
    pub c0: f64,
    /// RMS misfit.
    pub fit_residual: f64,
}

/// Least-squares fit of `u − v` on half-space points `grid`.
pub fn quadratic_difference_fit<U, V>(u: &U, v: &V, grid: &[Vec<f64>]) -> Result<QuadraticFit>
where
    U: ScalarField + ?Sized,
    V: ScalarField + ?Sized,
{
    if u.dim() != v.dim() {
        return Err(Error::ChartMismatch("u and v must live on the same half-space".into()));
    }
    let n = u.dim() - 1;
    let cols = 2 * n + 2;
    let mut a = Vec::with_capacity(grid.len() * cols);
    let mut b = Vec::with_capacity(grid.len());
    for p in grid {
        if p.len() != n + 1 {
            return Err(Error::Precondition("grid point dimension".into()));
        }
        a.push(p[n] * p[n]);
        a.extend(p[..n].iter().map(|x| x * x));
        a.extend_from_slice(&p[..n]);
        a.push(1.0);
        b.push(u.eval(p)? - v.eval(p)?);
    }
    let ls = least_squares(&a, grid.len(), cols, &b)?;
    let c = &ls.coeffs;
    let a_coeffs = c[1..=n].to_vec();
    let linear = c[n + 1..=2 * n].to_vec();
    let x0: Vec<f64> = a_coeffs
        .iter()
        .zip(&linear)
        .map(|(ai, bi)| if libm::fabs(*ai) < 1e-8 { 0.0 } else { -bi / (2.0 * ai) })
        .collect();
    let c0 = c[2 * n + 1] - a_coeffs.iter().zip(&x0).map(|(ai, xi)| ai * xi * xi).sum::<f64>();
    Ok(QuadraticFit {
        c_star: c[0],
        a_coeffs,
        linear,
        x0,
        c0,
        fit_residual: ls.rms_residual,
    })
}

/// Empirical constant of `v(X) ≥ −α log|X| − C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// `max(−α log|X| − v(X))` over `|X| ∈ [4, 10²]`.
    pub c_hat_inner: f64,
    /// The same over `|X| ∈ [4, 10³]`.
    pub c_hat_outer: f64,
    /// `c_hat_outer − c_hat_inner ≤ LOWER_BOUND_DRIFT`.
    pub bounded: bool,
}

/// Allowed growth of `Ĉ` when the radial range is extended tenfold.
pub const LOWER_BOUND_DRIFT: f64 = 0.05;

/// `Ĉ` along `rays` (unit directions with `t ≥ 0`), 16 radii per decade.
pub fn log_lower_bound_check<V: ScalarField + ?Sized>(v: &V, alpha: f64, rays: &[Vec<f64>]) -> Result<LowerBound> {
    let d = v.dim();
    let mut inner = f64::NEG_INFINITY;
    let mut outer = f64::NEG_INFINITY;
    let steps = 16.0 * libm::log10(1e3 / 4.0);
    let steps = libm::ceil(steps) as usize;
    for ray in rays {
        if ray.len() != d || ray[d - 1] < 0.0 {
            return Err(Error::Precondition("rays must be directions into the upper half-space".into()));
        }
        let nr = norm(ray);
        for i in 0..=steps {
            let r = 4.0 * libm::pow(250.0, i as f64 / steps as f64);
            let x: Vec<f64> = ray.iter().map(|c| r * c / nr).collect();
            let c = -alpha * libm::log(r) - v.eval(&x)?;
            outer = outer.max(c);
            if r <= 100.0 * (1.0 + 1e-12) {
                inner = inner.max(c);
            }
        }
    }
    Ok(LowerBound {
        c_hat_inner: inner,
        c_hat_outer: outer,
        bounded: outer - inner <= LOWER_BOUND_DRIFT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{
        biharmonic_extension_z, boundary_extremal, halfspace_solution, HalfSpaceExtremalParams,
    };
    use crate::field::{Affine, FnField};
    use crate::quadrature::sphere_rule;
    use crate::sampling::{ball_points, boundary_points, halfspace_points, sphere_points};
    use crate::vector::norm_sq;

    fn ball_samples(n: usize) -> Samples {
        Samples {
            interior: ball_points(n, 30, 0.1),
            boundary: sphere_points(n, 20),
        }
    }

    fn half_samples() -> Samples {
        Samples {
            interior: halfspace_points(3, 30, 2.0, 0.1, 2.0),
            boundary: boundary_points(3, 12, 2.0),
        }
    }

    #[test]
    fn closed_form_ball_systems() {
        let cfg = StencilConfig::default();
        let z = [0.3, 0.0, 0.0, 0.0];
        let r = ball_system_residual(
            &biharmonic_extension_z(3, &z).unwrap(),
            &boundary_extremal(4, 3, &z).unwrap(),
            0.0,
            &ball_samples(3),
            &cfg,
        )
        .unwrap();
        assert!(r.max() < 1e-6, "{r:?}");
        let z = [0.3, 0.0, 0.0, 0.0, 0.0, 0.0];
        let r = ball_system_residual(
            &biharmonic_extension_z(5, &z).unwrap(),
            &boundary_extremal(4, 5, &z).unwrap(),
            -1.0,
            &ball_samples(5),
            &cfg,
        )
        .unwrap();
        assert!(r.max() < 1e-6, "{r:?}");
    }

    #[test]
    fn quartic_is_not_biharmonic() {
        let v = FnField::new(Chart::Ball, 4, |x: &[f64]| norm_sq(x) * norm_sq(x));
        let f = FnField::new(Chart::Sphere, 4, |_| 1.0);
        let r = ball_system_residual(&v, &f, 0.0, &ball_samples(3), &StencilConfig::default()).unwrap();
        assert!((r.interior_sup - 192.0).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn halfspace_family() {
        let cfg = StencilConfig::default();
        for c in [0.0, -1.0] {
            let u = halfspace_solution(HalfSpaceExtremalParams::new(&[0.0; 3], 1.0, c)).unwrap();
            let r = halfspace_system_residual(&u, Nonlinearity::Exp3, &half_samples(), &cfg).unwrap();
            assert!(r.max() < 1e-5, "c={c}: {r:?}");
        }
        let cubic = FnField::new(Chart::HalfSpace, 4, |p: &[f64]| 2.0 / 3.0 * p[3] * p[3] * p[3]);
        let r = halfspace_system_residual(&cubic, Nonlinearity::Exp3, &half_samples(), &StencilConfig::polynomial())
            .unwrap();
        assert!(r.max() < 1e-9, "{r:?}");
    }

    #[test]
    fn sun_solution_residual() {
        let u = crate::closed_forms::sun_solution(&[0.0; 4], 1.0, 1.0, 4).unwrap();
        let c = u.nonlinearity_constant();
        let s = Samples {
            interior: halfspace_points(4, 20, 2.0, 0.1, 2.0),
            boundary: boundary_points(4, 10, 2.0),
        };
        let r = halfspace_system_residual(&u, Nonlinearity::Power { c }, &s, &StencilConfig::default()).unwrap();
        assert!(r.max() < 1e-5, "{r:?}");
    }

    #[test]
    fn euler_lagrange() {
        let cfg = StencilConfig::wide();
        let rule = sphere_rule(3, 16);
        let zero = FnField::new(Chart::Ball, 4, |_| 0.0);
        assert!(euler_lagrange_s3_residual(&zero, &ball_samples(3), &rule, &cfg).unwrap() < 1e-12);
        let v = biharmonic_extension_z(3, &[0.3, 0.0, 0.0, 0.0]).unwrap();
        let r0 = euler_lagrange_s3_residual(&v, &ball_samples(3), &rule, &cfg).unwrap();
        assert!(r0 < 1e-4, "{r0}");
        let r1 = euler_lagrange_s3_residual(&Affine::new(&v, 1.0, 1.0), &ball_samples(3), &rule, &cfg).unwrap();
        assert!(r1 < 1e-4 && (r1 - r0).abs() < 1e-8, "{r0} {r1}");
    }

    #[test]
    fn euler_lagrange_checks_neumann() {
        let v = FnField::new(Chart::Ball, 4, |x: &[f64]| x[0]);
        let e = euler_lagrange_s3_residual(&v, &ball_samples(3), &sphere_rule(3, 8), &StencilConfig::default());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn pizzetti_examples() {
        let cfg = StencilConfig::polynomial();
        let rule = sphere_rule(3, 6);
        let sq = FnField::new(Chart::Euclidean, 4, |x: &[f64]| norm_sq(x));
        assert!(pizzetti_gap(&sq, &[0.0; 4], 1.0, &rule, &cfg).unwrap() < 1e-10);
        let lin = FnField::new(Chart::Euclidean, 4, |x: &[f64]| x[0]);
        assert!(pizzetti_gap(&lin, &[0.3, -1.0, 2.0, 0.5], 0.8, &rule, &cfg).unwrap() < 1e-10);
        let cub = FnField::new(Chart::Euclidean, 4, |x: &[f64]| norm_sq(x) * x[0]);
        assert!(pizzetti_gap(&cub, &[0.2, 0.4, -0.1, 0.3], 0.7, &rule, &cfg).unwrap() < 1e-9);
        let quart = FnField::new(Chart::Euclidean, 4, |x: &[f64]| norm_sq(x) * norm_sq(x));
        // avg|X|⁴ over ∂B_r(0) = r⁴, Δ|X|⁴(0) = 0
        assert!((pizzetti_gap(&quart, &[0.0; 4], 0.5, &rule, &cfg).unwrap() - 0.0625).abs() < 1e-10);
    }

    #[test]
    fn quadratic_fit_recovers_construction() {
        let grid = halfspace_points(3, 60, 1.5, 0.0, 1.5);
        let u = halfspace_solution(HalfSpaceExtremalParams::new(&[0.0; 3], 1.0, -0.5)).unwrap();
        let v = halfspace_solution(HalfSpaceExtremalParams::new(&[0.0; 3], 1.0, 0.0)).unwrap();
        let fit = quadratic_difference_fit(&u, &v, &grid).unwrap();
        assert!((fit.c_star + 0.5).abs() < 1e-10 && fit.fit_residual < 1e-12, "{fit:?}");
        let fit = quadratic_difference_fit(&v, &v, &grid).unwrap();
        assert!(fit.c_star == 0.0 && fit.c0 == 0.0 && fit.fit_residual == 0.0);
        let shifted = FnField::new(Chart::HalfSpace, 4, |p: &[f64]| {
            2.0 * (p[0] - 0.5) * (p[0] - 0.5) - (p[2] + 1.0) * (p[2] + 1.0) + 0.25 * p[3] * p[3] + 3.0
        });
        let zero = FnField::new(Chart::HalfSpace, 4, |_| 0.0);
        let fit = quadratic_difference_fit(&shifted, &zero, &grid).unwrap();
        assert!((fit.x0[0] - 0.5).abs() < 1e-10 && (fit.x0[2] + 1.0).abs() < 1e-10 && (fit.c0 - 3.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_grid_is_rank_deficient() {
        let grid: Vec<Vec<f64>> = (0..20).map(|i| alloc::vec![i as f64, 0.0, 0.0, 1.0]).collect();
        let z = FnField::new(Chart::HalfSpace, 4, |_| 0.0);
        assert!(matches!(quadratic_difference_fit(&z, &z, &grid), Err(Error::RankDeficient)));
    }

    #[test]
    fn lower_bounds() {
        let rays = halfspace_points(3, 8, 1.0, 0.0, 1.0);
        let u = halfspace_solution(HalfSpaceExtremalParams::new(&[0.0; 3], 1.0, 0.0)).unwrap();
        assert!(log_lower_bound_check(&u, 2.0, &rays).unwrap().bounded);
        let zero = FnField::new(Chart::HalfSpace, 4, |_| 0.0);
        let r = log_lower_bound_check(&zero, 2.0, &rays).unwrap();
        assert!(r.bounded && r.c_hat_outer <= 0.0);
        let steep = FnField::new(Chart::HalfSpace, 4, |p: &[f64]| -3.0 * libm::log(norm(p)));
        assert!(!log_lower_bound_check(&steep, 2.0, &rays).unwrap().bounded);
    }
}
