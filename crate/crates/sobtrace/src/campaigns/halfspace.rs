//! Campaigns on the half-space and in flat space: the Möbius identity, the
//! classified solution family and Pizzetti's formula.

use std::f64::consts::PI;

use rand::Rng;
use sobtrace_core::chart::{identity_residual, ChartPoint};
use sobtrace_core::closed_forms::{halfspace_solution, HalfSpaceExtremalParams};
use sobtrace_core::diffops::{boundary_normal, laplacian, NormalKind, StencilConfig};
use sobtrace_core::field::FnField;
use sobtrace_core::functionals::{volumes_and_alpha, VolumeConfig};
use sobtrace_core::quadrature::sphere_rule;
use sobtrace_core::residuals::{halfspace_system_residual, pizzetti_gap, Nonlinearity, Samples};
use sobtrace_core::sampling::{boundary_points, halfspace_points};
use sobtrace_core::vector::{dist_sq, norm_sq};
use sobtrace_core::{Chart, Result, ScalarField};

use super::{guard, seeded};
use crate::config::{Family, RunConfig};
use crate::report::Check;

pub(crate) fn mobius_identity(cfg: &RunConfig) -> Vec<Check> {
    let n = cfg.dim;
    let mut rng = seeded(cfg.seed);
    let mut worst: f64 = 0.0;
    for i in 0..cfg.trials {
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let lambda = rng.gen_range(0.1..=10.0);
        // uniform in the ball of radius 10, folded into t ≥ 0
        let p = loop {
            let p: Vec<f64> = (0..=n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            if norm_sq(&p) <= 100.0 {
                break p;
            }
        };
        let r = ChartPoint::from_xt(&p[..n], p[n].abs()).and_then(|x| identity_residual(&a, lambda, &x));
        match r {
            Ok(r) => worst = worst.max(r.abs()),
            Err(e) => return vec![Check::failed("identity_residual_max", cfg.tol.identity, format!("sample {i}: {e}"))],
        }
    }
    vec![Check::at_most("identity_residual_max", worst, cfg.tol.identity)
        .with_detail(format!("{} samples", cfg.trials))]
}

/// Interior and boundary samples for the half-space system in `R⁴₊`.
pub fn halfspace_samples() -> Samples {
    Samples {
        interior: halfspace_points(3, 30, 2.0, 0.1, 2.0),
        boundary: boundary_points(3, 12, 2.0),
    }
}

fn system_checks<U: ScalarField>(u: &U, stencil: &StencilConfig, tol: f64) -> Result<Vec<Check>> {
    let r = halfspace_system_residual(u, Nonlinearity::Exp3, &halfspace_samples(), stencil)?;
    let mut checks = vec![Check::at_most("interior", r.interior_sup, tol)];
    for (name, value) in &r.boundary_sups {
        checks.push(Check::at_most(name.as_str(), *value, tol));
    }
    Ok(checks)
}

/// Closed-form values at `(a, 0)`: `Δu₁ = −4/λ²` for the log part
/// `u₁ = log(2λ/D)`, `Δu = −12/λ² + 2c` for the whole solution, and
/// `∂_tΔu(x, 0) = 32λ³/(λ² + |x−a|²)³` at `x ∈ {a, a+e₁, a+2e₁}`.
fn exact_value_checks<U: ScalarField>(u: &U, cfg: &RunConfig) -> Result<Vec<Check>> {
    let stencil = cfg.stencil();
    let (a, lambda) = (cfg.a.clone(), cfg.lambda);
    let mut centre = a.clone();
    centre.push(0.0);
    let ac = a.clone();
    let u1 = FnField::new(Chart::HalfSpace, 4, move |p: &[f64]| {
        (2.0 * lambda / ((lambda + p[3]).powi(2) + dist_sq(&p[..3], &ac))).ln()
    });
    let lap1 = laplacian(&u1, &centre, &stencil)?;
    let lap = laplacian(u, &centre, &stencil)?;
    let mut worst: f64 = 0.0;
    for shift in [0.0, 1.0, 2.0] {
        let mut p = centre.clone();
        p[0] += shift;
        let exact = 32.0 * lambda.powi(3) / (lambda * lambda + dist_sq(&p[..3], &a)).powi(3);
        worst = worst.max((boundary_normal(u, &p, NormalKind::DtDeltaU, &stencil)? - exact).abs());
    }
    let l2 = lambda * lambda;
    Ok(vec![
        Check::near("laplacian_u1_at_center", lap1, -4.0 / l2, cfg.tol.laplacian),
        Check::near("laplacian_at_center", lap, -12.0 / l2 + 2.0 * cfg.c, cfg.tol.residual),
        Check::at_most("dt_laplacian_exact", worst, cfg.tol.residual),
    ])
}

fn volume_checks<U: ScalarField>(u: &U, vc: &VolumeConfig, tol: f64) -> Result<Vec<Check>> {
    let r = volumes_and_alpha(u, vc)?;
    Ok(vec![
        Check::near("boundary_volume", r.boundary_volume, 2.0 * PI * PI, tol),
        Check::near("alpha", r.alpha, 2.0, tol),
        Check::flag("boundary_volume_finite", !r.boundary_divergent)
            .with_detail(format!("coarse {:e}, fine {:e}", r.boundary_coarse, r.boundary_volume)),
        Check::flag("interior_volume_finite", !r.interior_divergent)
            .with_detail(format!("coarse {:e}, fine {:e}", r.interior_coarse, r.interior_volume)),
    ])
}

pub(crate) fn residual_halfspace(cfg: &RunConfig) -> Vec<Check> {
    match cfg.family {
        Family::Bubble => {
            let u = match halfspace_solution(HalfSpaceExtremalParams::new(&cfg.a, cfg.lambda, cfg.c)) {
                Ok(u) => u,
                Err(e) => return vec![Check::failed("interior", cfg.tol.residual, e)],
            };
            let mut checks = guard("interior", cfg.tol.residual, system_checks(&u, &cfg.stencil(), cfg.tol.residual));
            checks.extend(guard("laplacian_at_center", cfg.tol.laplacian, exact_value_checks(&u, cfg)));
            let vc = VolumeConfig {
                res: cfg.res_sphere,
                center: cfg.a.clone(),
                scale: cfg.lambda,
            };
            checks.extend(guard("boundary_volume", cfg.tol.volume, volume_checks(&u, &vc, cfg.tol.volume)));
            checks
        }
        Family::Cubic => {
            let u = FnField::new(Chart::HalfSpace, 4, |p: &[f64]| 2.0 / 3.0 * p[3].powi(3));
            let tol = cfg.tol.counterexample;
            let mut checks = guard("interior", tol, system_checks(&u, &StencilConfig::polynomial(), tol));
            let vc = VolumeConfig {
                res: cfg.res_sphere,
                center: vec![0.0; 3],
                scale: 1.0,
            };
            checks.extend(guard("boundary_volume", cfg.tol.volume, volume_checks(&u, &vc, cfg.tol.volume)));
            checks
        }
    }
}

type Poly = Box<dyn Fn(&[f64]) -> f64>;

/// Biharmonic polynomials of degree ≤ 4 in `R^d` (`d ≥ 2`): harmonic ones
/// and `|X|²` times harmonic ones.
pub fn biharmonic_basis(d: usize) -> Vec<Poly> {
    let mut b: Vec<Poly> = vec![Box::new(|_| 1.0), Box::new(norm_sq)];
    for i in 0..d {
        b.push(Box::new(move |x| x[i]));
        b.push(Box::new(move |x| norm_sq(x) * x[i]));
        for j in i + 1..d {
            b.push(Box::new(move |x| x[i] * x[j]));
            b.push(Box::new(move |x| norm_sq(x) * x[i] * x[j]));
            b.push(Box::new(move |x| x[i].powi(3) - 3.0 * x[i] * x[j] * x[j]));
            b.push(Box::new(move |x| x[i].powi(4) - 6.0 * (x[i] * x[j]).powi(2) + x[j].powi(4)));
        }
    }
    b.push(Box::new(|x| x[0] * x[0] - x[1] * x[1]));
    b.push(Box::new(|x| norm_sq(x) * (x[0] * x[0] - x[1] * x[1])));
    if d >= 3 {
        b.push(Box::new(|x| x[0] * x[1] * x[2]));
    }
    if d >= 4 {
        b.push(Box::new(|x| x[0] * x[1] * x[2] * x[3]));
    }
    b
}

pub(crate) fn pizzetti(cfg: &RunConfig) -> Vec<Check> {
    let d = cfg.dim + 1;
    let basis = biharmonic_basis(d);
    let rule = sphere_rule(d - 1, 6);
    let stencil = StencilConfig::polynomial();
    let mut rng = seeded(cfg.seed);
    let mut worst: f64 = 0.0;
    let mut first = None;
    for i in 0..cfg.trials {
        let coeffs: Vec<f64> = basis.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x0: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let r = rng.gen_range(0.1..1.5);
        first.get_or_insert((x0.clone(), r));
        let w = FnField::new(Chart::Euclidean, d, |x: &[f64]| {
            basis.iter().zip(&coeffs).map(|(p, c)| c * p(x)).sum()
        });
        match pizzetti_gap(&w, &x0, r, &rule, &stencil) {
            Ok(g) => worst = worst.max(g),
            Err(e) => return vec![Check::failed("biharmonic_gap_max", cfg.tol.pizzetti, format!("sample {i}: {e}"))],
        }
    }
    let mut checks = vec![Check::at_most("biharmonic_gap_max", worst, cfg.tol.pizzetti)
        .with_detail(format!("{} random polynomials", cfg.trials))];
    // |X|⁴ is not biharmonic; the neglected term of the expansion is exactly r⁴.
    let (x0, r) = first.expect("trials ≥ 1");
    let quartic = FnField::new(Chart::Euclidean, d, |x: &[f64]| norm_sq(x) * norm_sq(x));
    checks.push(match pizzetti_gap(&quartic, &x0, r, &rule, &stencil) {
        Ok(g) => Check::near("quartic_control_gap", g, r.powi(4), cfg.tol.pizzetti),
        Err(e) => Check::failed("quartic_control_gap", cfg.tol.pizzetti, e),
    });
    checks
}
