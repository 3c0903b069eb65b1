//! Both sides of the sharp trace inequalities, their deficits, the
//! ball/half-space energy identity and the finite-volume quantities.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::closed_forms::{transfer_field, TransferMode};
use crate::diffops::{boundary_normal, laplacian, tangential_gradient_sq, NormalKind, StencilConfig};
use crate::field::SphereTrace;
use crate::quadrature::{
    ball_rule, compactified_rule_at, integrate, sphere_rule, Domain, ProductRule, QuadRule, Rule, RuleMeta,
};
use crate::sum::NeumaierSum;
use crate::{sphere_area, Chart, Error, Result, ScalarField};

/// Constants of the sharp inequalities in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityConstants {
    pub n: usize,
    /// `2 Γ((n+3)/2)/Γ((n-3)/2) |S^n|^{3/n}`; `None` unless `n > 3`.
    pub a_n: Option<f64>,
    /// `(n+1)(n-3)/2`.
    pub b_n: f64,
    /// `Γ((n+1)/2)/Γ((n-1)/2) |S^n|^{1/n}`; `None` for `n = 1`.
    pub sharp2: Option<f64>,
}

pub fn constants(n: usize) -> Result<InequalityConstants> {
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    let nf = n as f64;
    let area = sphere_area(n);
    let a_n = (n > 3).then(|| {
        2.0 * libm::exp(libm::lgamma((nf + 3.0) / 2.0) - libm::lgamma((nf - 3.0) / 2.0)) * libm::pow(area, 3.0 / nf)
    });
    let sharp2 = (n > 1).then(|| {
        libm::exp(libm::lgamma((nf + 1.0) / 2.0) - libm::lgamma((nf - 1.0) / 2.0)) * libm::pow(area, 1.0 / nf)
    });
    Ok(InequalityConstants {
        n,
        a_n,
        b_n: (nf + 1.0) * (nf - 3.0) / 2.0,
        sharp2,
    })
}

/// Quadrature for the ball and sphere integrals of a deficit.
#[derive(Debug, Clone)]
pub struct DeficitRules {
    pub ball: ProductRule,
    pub sphere: QuadRule,
}

impl DeficitRules {
    /// `ball_rule(n, res_radial, res_sphere)` and `sphere_rule(n, res_sphere)`.
    pub fn new(n: usize, res_sphere: usize, res_radial: usize) -> Self {
        Self {
            ball: ball_rule(n, res_radial, res_sphere),
            sphere: sphere_rule(n, res_sphere),
        }
    }
}

/// One evaluated inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct DeficitReport {
    pub order: u32,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub deficit: f64,
    /// Named pieces of the right-hand side.
    pub terms: Vec<(String, f64)>,
    pub ball_meta: RuleMeta,
    pub sphere_meta: RuleMeta,
}

/// Number of sphere points at which boundary conditions are checked.
pub const PRECONDITION_SAMPLES: usize = 32;
/// Tolerance for the Dirichlet match `v = f`.
pub const DIRICHLET_TOL: f64 = 1e-8;
/// Tolerance for finite-difference Neumann checks.
pub const NEUMANN_TOL: f64 = 1e-6;

/// `log ∮ e^{g}` by log-sum-exp over the rule.
pub fn log_integral_exp<R: Rule + ?Sized>(rule: &R, g: &mut dyn FnMut(&[f64]) -> Result<f64>) -> Result<f64> {
    let mut vals = Vec::with_capacity(rule.len());
    let mut m = f64::NEG_INFINITY;
    rule.try_for_each(&mut |x, w| {
        let v = g(x)?;
        m = m.max(v);
        vals.push((v, w));
        Ok(())
    })?;
    if !m.is_finite() {
        return Err(Error::Precondition("exponent is not finite".into()));
    }
    let mut s = NeumaierSum::new();
    for (v, w) in vals {
        s.add(w * libm::exp(v - m));
    }
    Ok(m + libm::log(s.sum()))
}

fn check_boundary_conditions(
    order: u32,
    n: usize,
    f: &dyn ScalarField,
    v: &dyn ScalarField,
    cfg: &StencilConfig,
) -> Result<()> {
    for xi in crate::sampling::sphere_points(n, PRECONDITION_SAMPLES) {
        let fv = f.eval(&xi)?;
        let vv = v.eval(&xi)?;
        if libm::fabs(fv - vv) > DIRICHLET_TOL * fv.abs().max(1.0) {
            return Err(Error::Precondition(format!(
                "Dirichlet condition v = f fails at {xi:?}: v = {vv}, f = {fv}"
            )));
        }
        if order == 4 {
            let beta = -((n as f64) - 3.0) / 2.0;
            let eta = boundary_normal(v, &xi, NormalKind::EtaV, cfg)?;
            if libm::fabs(eta - beta * fv) > NEUMANN_TOL * fv.abs().max(1.0) {
                return Err(Error::Precondition(format!(
                    "Neumann condition ηv = {beta}·f fails at {xi:?}: ηv = {eta}"
                )));
            }
        }
    }
    Ok(())
}

/// `RHS - LHS` of the order-2 (`n ≥ 1`) or order-4 (`n ≥ 3`) sharp trace
/// inequality for boundary data `f` (a sphere field) and extension `v` (a
/// ball field).
///
/// Boundary conditions are checked first at [`PRECONDITION_SAMPLES`] points:
/// `v = f` always, and for order 4 also `ηv = -(n-3)/2·f`.
pub fn deficit<F, V>(order: u32, f: &F, v: &V, rules: &DeficitRules, cfg: &StencilConfig) -> Result<DeficitReport>
where
    F: ScalarField + ?Sized,
    V: ScalarField + ?Sized,
{
    let f: &dyn ScalarField = &f;
    let v: &dyn ScalarField = &v;
    let n = v.dim() - 1;
    crate::closed_forms::check_order(order, n)?;
    if f.dim() != n + 1 || v.chart() != Chart::Ball {
        return Err(Error::ChartMismatch("deficit needs a ball extension and sphere data of the same n".into()));
    }
    if rules.sphere.domain() != Domain::Sphere(n) || rules.ball.domain() != Domain::Ball(n + 1) {
        return Err(Error::Precondition("rules do not match the dimension".into()));
    }
    check_boundary_conditions(order, n, f, v, cfg)?;
    let nf = n as f64;
    let consts = constants(n)?;
    let sphere = &rules.sphere;
    let mut terms = Vec::new();
    let (lhs, rhs) = match (order, n) {
        (2, 1) => {
            let log_int = log_integral_exp(sphere, &mut |x| f.eval(x))?;
            let grad = integrate(&rules.ball, |x| {
                let g = crate::diffops::gradient(v, x, cfg)?;
                Ok(crate::vector::norm_sq(&g))
            })?;
            let mean = integrate(sphere, |x| f.eval(x))?;
            terms.push(("dirichlet_energy".into(), grad / (4.0 * PI)));
            terms.push(("mean".into(), mean / (2.0 * PI)));
            (log_int - libm::log(2.0 * PI), grad / (4.0 * PI) + mean / (2.0 * PI))
        }
        (2, _) => {
            let p = 2.0 * nf / (nf - 1.0);
            let lp = integrate(sphere, |x| Ok(libm::pow(libm::fabs(f.eval(x)?), p)))?;
            let grad = integrate(&rules.ball, |x| {
                let g = crate::diffops::gradient(v, x, cfg)?;
                Ok(crate::vector::norm_sq(&g))
            })?;
            let l2 = integrate(sphere, |x| {
                let y = f.eval(x)?;
                Ok(y * y)
            })?;
            terms.push(("dirichlet_energy".into(), grad));
            terms.push(("boundary_l2".into(), (nf - 1.0) / 2.0 * l2));
            let sharp = consts.sharp2.unwrap_or(0.0);
            (sharp * libm::pow(lp, (nf - 1.0) / nf), grad + (nf - 1.0) / 2.0 * l2)
        }
        (4, 3) => {
            let log_int = log_integral_exp(sphere, &mut |x| Ok(3.0 * f.eval(x)?))?;
            let (lap2, grad, mean) = order4_terms(f, v, rules, cfg)?;
            let c = 3.0 / (16.0 * PI * PI);
            terms.push(("interior".into(), c * lap2));
            terms.push(("tangential".into(), 2.0 * c * grad));
            terms.push(("mean".into(), 8.0 * c * mean));
            (log_int - libm::log(2.0 * PI * PI), c * lap2 + 2.0 * c * grad + 8.0 * c * mean)
        }
        (4, _) => {
            let p = 2.0 * nf / (nf - 3.0);
            let lp = integrate(sphere, |x| Ok(libm::pow(libm::fabs(f.eval(x)?), p)))?;
            let (lap2, grad, _) = order4_terms(f, v, rules, cfg)?;
            let l2 = integrate(sphere, |x| {
                let y = f.eval(x)?;
                Ok(y * y)
            })?;
            terms.push(("interior".into(), lap2));
            terms.push(("tangential".into(), 2.0 * grad));
            terms.push(("boundary_l2".into(), consts.b_n * l2));
            let a_n = consts.a_n.unwrap_or(0.0);
            (a_n * libm::pow(lp, (nf - 3.0) / nf), lap2 + 2.0 * grad + consts.b_n * l2)
        }
        _ => unreachable!("check_order rejects other cases"),
    };
    Ok(DeficitReport {
        order,
        n,
        lhs,
        rhs,
        deficit: rhs - lhs,
        terms,
        ball_meta: rules.ball.meta(),
        sphere_meta: rules.sphere.meta(),
    })
}

/// `(∫(Δv)², ∮|∇̄f|², ∮f)`.
fn order4_terms(
    f: &dyn ScalarField,
    v: &dyn ScalarField,
    rules: &DeficitRules,
    cfg: &StencilConfig,
) -> Result<(f64, f64, f64)> {
    let lap2 = integrate(&rules.ball, |x| {
        let l = laplacian(v, x, cfg)?;
        Ok(l * l)
    })?;
    let grad = integrate(&rules.sphere, |x| tangential_gradient_sq(f, x, cfg))?;
    let mean = integrate(&rules.sphere, |x| f.eval(x))?;
    Ok((lap2, grad, mean))
}

/// Both sides of `∫_{R^{n+1}_+} |ΔU|² = ∫_B (Δv)² + 2∮|∇̄f|² + b_n ∮ f²`
/// with `U` the weight-power transfer of `v` and `f = v|_{S^n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyIdentity {
    pub left: f64,
    /// Left side at the refined resolution.
    pub left_fine: f64,
    pub right: f64,
    /// `|left_fine - right|`.
    pub gap: f64,
    /// `gap / |right|`.
    pub relative_gap: f64,
}

/// Resolutions for [`energy_identity_gap`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRules {
    pub ball_sphere: usize,
    pub ball_radial: usize,
    pub half_sphere: usize,
    pub half_radial: usize,
    /// Relative coarse/fine tolerance of the half-space integral.
    pub refine_tol: f64,
}

/// The integrands are smooth after compactification; at these resolutions
/// both sides of the identity agree to ~1e-7 for n = 4. The product rules
/// grow like `res^n`, so the defaults are deliberately small.
impl Default for EnergyRules {
    fn default() -> Self {
        Self {
            ball_sphere: 6,
            ball_radial: 8,
            half_sphere: 6,
            half_radial: 12,
            refine_tol: 1e-4,
        }
    }
}

pub fn energy_identity_gap<V>(v: V, rules: &EnergyRules, cfg: &StencilConfig) -> Result<EnergyIdentity>
where
    V: ScalarField + Clone,
{
    let n = v.dim() - 1;
    if n <= 3 {
        return Err(Error::Domain("the energy identity is stated for n > 3".into()));
    }
    let u = transfer_field(v.clone(), TransferMode::WeightPower)?;
    let half = |m: usize, s: usize| -> Result<f64> {
        let r = compactified_rule_at(Domain::HalfSpace(n + 1), m, s, None, 1.0)?;
        integrate(&r, |x| {
            let l = laplacian(&u, x, cfg)?;
            Ok(l * l)
        })
    };
    let left = half(rules.half_radial, rules.half_sphere)?;
    let left_fine = half(2 * rules.half_radial, rules.half_sphere + rules.half_sphere / 2)?;
    if !left.is_finite() || libm::fabs(left_fine - left) > rules.refine_tol * libm::fabs(left_fine) {
        return Err(Error::Convergence {
            what: "half-space energy".into(),
            coarse: left,
            fine: left_fine,
        });
    }
    let ball = ball_rule(n, rules.ball_radial, rules.ball_sphere);
    let sphere = sphere_rule(n, rules.ball_sphere);
    let f = SphereTrace(v.clone());
    let lap2 = integrate(&ball, |x| {
        let l = laplacian(&v, x, cfg)?;
        Ok(l * l)
    })?;
    let grad = integrate(&sphere, |x| tangential_gradient_sq(&f, x, cfg))?;
    let l2 = integrate(&sphere, |x| {
        let y = v.eval(x)?;
        Ok(y * y)
    })?;
    let right = lap2 + 2.0 * grad + constants(n)?.b_n * l2;
    let gap = libm::fabs(left_fine - right);
    Ok(EnergyIdentity {
        left,
        left_fine,
        right,
        gap,
        relative_gap: gap / libm::fabs(right).max(1e-300),
    })
}

/// Where the mass of `e^{3u(·,0)}` sits, for the compactified rules.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeConfig {
    /// Angular resolution; the radial one is twice this. The refined pass
    /// doubles both.
    pub res: usize,
    /// Center `x_c ∈ R^n` of the bulk.
    pub center: Vec<f64>,
    /// Length scale of the bulk.
    pub scale: f64,
}

/// Finite-volume quantities of a half-space field.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeReport {
    /// `∫_{R^n} e^{3u(x,0)} dx` (refined value).
    pub boundary_volume: f64,
    /// `∫_{R^{n+1}_+} e^{4u} dx dt` (refined value).
    pub interior_volume: f64,
    /// `2 · boundary_volume / |S^n|`.
    pub alpha: f64,
    pub boundary_coarse: f64,
    pub interior_coarse: f64,
    pub boundary_divergent: bool,
    pub interior_divergent: bool,
}

/// Relative growth across one refinement above which an integral is
/// declared divergent.
pub const DIVERGENCE_GROWTH: f64 = 0.1;

fn divergent(coarse: f64, fine: f64) -> bool {
    !coarse.is_finite() || !fine.is_finite() || libm::fabs(fine - coarse) > DIVERGENCE_GROWTH * libm::fabs(coarse)
}

/// Boundary and interior volumes, `α`, and divergence flags from a
/// coarse/fine pair of compactified rules. Divergence is reported, not
/// raised; overflowing integrals come back as `+∞`.
pub fn volumes_and_alpha<U: ScalarField + ?Sized>(u: &U, cfg: &VolumeConfig) -> Result<VolumeReport> {
    let u: &dyn ScalarField = &u;
    if u.chart() != Chart::HalfSpace {
        return Err(Error::ChartMismatch("volumes need a half-space field".into()));
    }
    let n = u.dim() - 1;
    if cfg.center.len() != n {
        return Err(Error::Precondition("volume center dimension".into()));
    }
    let mut centre_t = cfg.center.clone();
    centre_t.push(0.0);
    let boundary = |res: usize| -> Result<f64> {
        let r = compactified_rule_at(Domain::Euclidean(n), 2 * res, res, Some(&cfg.center), cfg.scale)?;
        let mut p = Vec::with_capacity(n + 1);
        integrate(&r, |x| {
            p.clear();
            p.extend_from_slice(x);
            p.push(0.0);
            Ok(libm::exp(3.0 * u.eval(&p)?))
        })
    };
    let interior = |res: usize| -> Result<f64> {
        let r = compactified_rule_at(Domain::HalfSpace(n + 1), 2 * res, res, Some(&centre_t), cfg.scale)?;
        integrate(&r, |x| Ok(libm::exp(4.0 * u.eval(x)?)))
    };
    let (bc, bf) = (boundary(cfg.res)?, boundary(2 * cfg.res)?);
    let (ic, i_f) = (interior(cfg.res)?, interior(2 * cfg.res)?);
    let clean = |x: f64| if x.is_nan() { f64::INFINITY } else { x };
    Ok(VolumeReport {
        boundary_volume: clean(bf),
        interior_volume: clean(i_f),
        alpha: 2.0 * clean(bf) / sphere_area(n),
        boundary_coarse: clean(bc),
        interior_coarse: clean(ic),
        boundary_divergent: divergent(bc, bf),
        interior_divergent: divergent(ic, i_f),
    })
}
