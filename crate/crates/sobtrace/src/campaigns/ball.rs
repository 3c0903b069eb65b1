//! Campaigns on the unit ball: closed-form extremals, deficits, the spectral
//! oracle, the energy identity and the Euler–Lagrange equation on `S³`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sobtrace_core::closed_forms::{
    biharmonic_extension_z, boundary_extremal, harmonic_extension_z,
};
use sobtrace_core::diffops::{boundary_normal, laplacian, NormalKind, StencilConfig};
use sobtrace_core::field::{Affine, Combination, FnField, SphereTrace};
use sobtrace_core::functionals::{deficit, energy_identity_gap, DeficitRules, EnergyRules};
use sobtrace_core::quadrature::sphere_rule;
use sobtrace_core::residuals::{ball_system_residual, euler_lagrange_s3_residual, Samples};
use sobtrace_core::sampling::{ball_points, sphere_points};
use sobtrace_core::spectral::{compare_closed_form, reconstruct, solve_modes, ZonalExpansion};
use sobtrace_core::vector::norm_sq;
use sobtrace_core::{Chart, Result, ScalarField};

use super::{guard, random_unit, seeded};
use crate::config::{EnergyField, RunConfig, Tolerances};
use crate::report::Check;

/// Interior and boundary samples used by every ball residual.
pub fn ball_samples(n: usize) -> Samples {
    Samples {
        interior: ball_points(n, 30, 0.1),
        boundary: sphere_points(n, 20),
    }
}

fn neumann_beta(n: usize) -> f64 {
    -(n as f64 - 3.0) / 2.0
}

fn consistency<V: ScalarField, F: ScalarField>(v: &V, f: &F, n: usize, tol: f64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for xi in sphere_points(n, 200) {
        let fv = f.eval(&xi)?;
        worst = worst.max((v.eval(&xi)? - fv).abs() / (1.0 + fv.abs()));
    }
    Ok(Check::at_most("boundary_consistency", worst, tol))
}

/// Residuals of the ball system satisfied by the closed-form extension,
/// and agreement of its trace with the boundary extremal.
pub fn extremal_system_checks(order: u32, n: usize, z0: &[f64], cfg: &StencilConfig, tol: &Tolerances) -> Result<Vec<Check>> {
    let f = boundary_extremal(order, n, z0)?;
    let samples = ball_samples(n);
    let mut checks = Vec::new();
    if order == 4 {
        let v = biharmonic_extension_z(n, z0)?;
        let r = ball_system_residual(&v, &f, neumann_beta(n), &samples, cfg)?;
        checks.push(Check::at_most("interior", r.interior_sup, tol.residual));
        for (name, value) in &r.boundary_sups {
            checks.push(Check::at_most(name.as_str(), *value, tol.residual));
        }
        checks.push(consistency(&v, &f, n, tol.consistency)?);
    } else {
        let v = harmonic_extension_z(n, z0)?;
        let mut lap: f64 = 0.0;
        for p in &samples.interior {
            lap = lap.max(laplacian(&v, p, cfg)?.abs());
        }
        let mut dir: f64 = 0.0;
        for xi in &samples.boundary {
            dir = dir.max((v.eval(xi)? - f.eval(xi)?).abs());
        }
        checks.push(Check::at_most("interior", lap, tol.residual));
        checks.push(Check::at_most("dirichlet", dir, tol.residual));
        checks.push(consistency(&v, &f, n, tol.consistency)?);
    }
    Ok(checks)
}

/// `|deficit|` of the closed-form extremal pair.
pub fn extremal_deficit_check(cfg: &RunConfig, name: &str) -> Result<Check> {
    let n = cfg.dim;
    let f = boundary_extremal(cfg.order, n, &cfg.z0)?;
    let rules = DeficitRules::new(n, cfg.res_sphere, cfg.res_radial);
    let r = if cfg.order == 4 {
        deficit(4, &f, &biharmonic_extension_z(n, &cfg.z0)?, &rules, &cfg.stencil())?
    } else {
        deficit(2, &f, &harmonic_extension_z(n, &cfg.z0)?, &rules, &cfg.stencil())?
    };
    Ok(Check::at_most(name, r.deficit, cfg.tol.deficit).with_detail(format!(
        "lhs {:e}, rhs {:e}, resolution {}x{}",
        r.lhs, r.rhs, cfg.res_sphere, cfg.res_radial
    )))
}

pub(crate) fn verify_extremal(cfg: &RunConfig) -> Vec<Check> {
    let mut checks = guard("residuals", cfg.tol.residual, extremal_system_checks(cfg.order, cfg.dim, &cfg.z0, &cfg.stencil(), &cfg.tol));
    checks.push(extremal_deficit_check(cfg, "deficit").unwrap_or_else(|e| Check::failed("deficit", cfg.tol.deficit, e)));
    checks
}

/// Number of perturbed modes in the deficit scan.
const SCAN_MODES: usize = 6;

/// Deficit of the extremal plus one random zonal perturbation, extended
/// mode by mode so that `ηv = βf` holds exactly.
fn perturbed_deficit(cfg: &RunConfig, rng: &mut ChaCha8Rng, rules: &DeficitRules) -> Result<f64> {
    let n = cfg.dim;
    let beta = neumann_beta(n);
    let axis = random_unit(rng, n + 1);
    // log-uniform amplitude in [1e-3, 0.5]: deficits from ~1e-6 upwards
    let amp = 10f64.powf(rng.gen_range(-3.0..0.5f64.log10()));
    let coeffs: Vec<f64> = (0..=SCAN_MODES)
        .map(|k| amp * rng.gen_range(-1.0..1.0) / ((1 + k) * (1 + k)) as f64)
        .collect();
    let g = reconstruct(solve_modes(&ZonalExpansion { axis: axis.clone(), n, coeffs }, beta), &axis, n)?;
    let f0 = boundary_extremal(4, n, &cfg.z0)?;
    let v0 = biharmonic_extension_z(n, &cfg.z0)?;
    let f = Combination { first: &f0, second: SphereTrace(&g), a: 1.0, b: 1.0, c: 0.0 };
    let v = Combination { first: &v0, second: &g, a: 1.0, b: 1.0, c: 0.0 };
    Ok(deficit(4, &f, &v, rules, &cfg.stencil())?.deficit)
}

pub(crate) fn deficit_scan(cfg: &RunConfig) -> Vec<Check> {
    let mut checks = vec![extremal_deficit_check(cfg, "extremal_deficit")
        .unwrap_or_else(|e| Check::failed("extremal_deficit", cfg.tol.deficit, e))];
    let rules = DeficitRules::new(cfg.dim, cfg.res_sphere, cfg.res_radial);
    let mut rng = seeded(cfg.seed);
    let (mut min, mut at) = (f64::INFINITY, 0);
    for i in 0..cfg.trials {
        let failure = match perturbed_deficit(cfg, &mut rng, &rules) {
            Ok(d) if d.is_finite() => {
                if d < min {
                    (min, at) = (d, i);
                }
                continue;
            }
            Ok(d) => format!("trial {i}: deficit {d}"),
            Err(e) => format!("trial {i}: {e}"),
        };
        checks.push(Check::failed("min_deficit", cfg.tol.scan, failure));
        return checks;
    }
    checks.push(
        Check::at_least("min_deficit", min, cfg.tol.scan)
            .with_detail(format!("{} perturbations, minimum at trial {at}", cfg.trials)),
    );
    checks
}

pub(crate) fn spectral_compare(cfg: &RunConfig) -> Vec<Check> {
    let n = cfg.dim;
    let mut samples = ball_points(n, 30, 0.05);
    samples.extend(sphere_points(n, 10));
    let tol = cfg.tol.spectral;
    let r = match compare_closed_form(&cfg.z0, n, cfg.kmax, &samples, tol) {
        Ok(r) => r,
        Err(e) => return vec![Check::failed("biharmonic_gap", tol, e)],
    };
    let mut checks = Vec::new();
    if let Some(g) = r.biharmonic_gap {
        checks.push(Check::at_most("biharmonic_gap", g, tol));
    }
    checks.push(Check::at_most("harmonic_gap", r.harmonic_gap, tol));
    checks.push(Check::at_most("tail_bound", r.tail_bound, tol).with_detail(format!("kmax {}", cfg.kmax)));
    checks
}

/// Energy identity together with the Neumann condition `ηv = −(n−3)/2·v`
/// it presupposes.
pub fn energy_checks<V: ScalarField + Clone>(v: V, cfg: &RunConfig) -> Vec<Check> {
    let n = cfg.dim;
    let stencil = cfg.stencil();
    let beta = neumann_beta(n);
    let neumann = (|| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for xi in sphere_points(n, 20) {
            worst = worst.max((boundary_normal(&v, &xi, NormalKind::EtaV, &stencil)? - beta * v.eval(&xi)?).abs());
        }
        Ok(worst)
    })();
    let mut checks = vec![match neumann {
        Ok(w) => Check::at_most("neumann", w, cfg.tol.residual),
        Err(e) => Check::failed("neumann", cfg.tol.residual, e),
    }];
    let rules = EnergyRules {
        ball_sphere: cfg.res_sphere,
        ball_radial: cfg.res_radial,
        ..EnergyRules::default()
    };
    checks.push(match energy_identity_gap(v, &rules, &stencil) {
        Ok(e) => Check::at_most("relative_gap", e.relative_gap, cfg.tol.energy)
            .with_detail(format!("half-space {:e}, ball side {:e}", e.left_fine, e.right)),
        Err(e) => Check::failed("relative_gap", cfg.tol.energy, e),
    });
    checks
}

/// `1 + (n−3)(1−|X|²)/4`: biharmonic with trace 1 and `ηv = −(n−3)/2`.
pub fn radial_field(n: usize) -> FnField<impl Fn(&[f64]) -> f64 + Clone> {
    let k = (n as f64 - 3.0) / 4.0;
    FnField::new(Chart::Ball, n + 1, move |x: &[f64]| 1.0 + k * (1.0 - norm_sq(x)))
}

pub(crate) fn energy_identity(cfg: &RunConfig) -> Vec<Check> {
    let n = cfg.dim;
    match cfg.field {
        EnergyField::Extremal => match biharmonic_extension_z(n, &cfg.z0) {
            Ok(v) => energy_checks(v, cfg),
            Err(e) => vec![Check::failed("relative_gap", cfg.tol.energy, e)],
        },
        EnergyField::One => energy_checks(FnField::new(Chart::Ball, n + 1, |_: &[f64]| 1.0), cfg),
        EnergyField::Radial => energy_checks(radial_field(n), cfg),
    }
}

pub(crate) fn el_check(cfg: &RunConfig) -> Vec<Check> {
    let stencil = StencilConfig {
        h: cfg.fd_h,
        ..StencilConfig::wide()
    };
    let rule = sphere_rule(3, cfg.res_sphere);
    let samples = ball_samples(3);
    let run = || -> Result<(f64, f64)> {
        let v = biharmonic_extension_z(3, &cfg.z0)?;
        let r0 = euler_lagrange_s3_residual(&v, &samples, &rule, &stencil)?;
        let r1 = euler_lagrange_s3_residual(&Affine::new(&v, 1.0, 1.0), &samples, &rule, &stencil)?;
        Ok((r0, r1))
    };
    match run() {
        Ok((r0, r1)) => vec![
            Check::at_most("el_residual", r0, cfg.tol.el),
            Check::at_most("el_shift_invariance", r1 - r0, cfg.tol.shift),
        ],
        Err(e) => vec![Check::failed("el_residual", cfg.tol.el, e)],
    }
}
