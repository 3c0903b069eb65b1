//! Finite-difference differential operators on [`ScalarField`]s.
//!
//! All operators are tensor products of 1D stencils taken along straight
//! lines in a fixed orthonormal frame; the weights come from Fornberg's
//! recursion, so any derivative order and accuracy is available, central or
//! one-sided. Half-space fields are never sampled below `t = 0`: near the
//! boundary the `t` factor switches to a forward stencil. Richardson
//! extrapolation (step ratio 2) is applied on top.
//!
//! Error model (heuristic): truncation `O(h^p)` with `p = scheme_order` and
//! `p` raised by 2 (central) or 1 (one-sided) per Richardson level, plus
//! roundoff `O(ε |f| / h^m)` for an `m`-th derivative. That is why the
//! fourth-order and nested operators have their own, larger steps.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::sum::NeumaierSum;
use crate::vector::{norm, orthonormal_complement, unit};
use crate::{Chart, Error, Result, ScalarField};

/// Step sizes and accuracy settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilConfig {
    /// Step for first/second-order operators.
    pub h: f64,
    /// Accuracy order of every stencil: 2, 4, 6 or 8.
    pub scheme_order: u32,
    /// Richardson levels, at most 3.
    pub richardson_levels: u32,
    /// Points of the one-sided first-derivative stencil used for `ηv` and
    /// `∂_t u` (accuracy `one_sided_depth - 1`).
    pub one_sided_depth: usize,
    /// Step for the bilaplacian.
    pub h_bilaplacian: f64,
    /// Step for normal derivatives and the third-order boundary operators.
    pub h_normal: f64,
    /// Accuracy order of the bilaplacian stencils (no Richardson: it
    /// amplifies roundoff of fourth differences more than it removes
    /// truncation).
    pub bilaplacian_order: u32,
    /// Accuracy order of `η(Δv)` and `∂_tΔu`.
    pub normal_order: u32,
}

impl Default for StencilConfig {
    fn default() -> Self {
        Self {
            h: 1e-2,
            scheme_order: 4,
            richardson_levels: 1,
            one_sided_depth: 5,
            h_bilaplacian: 0.02,
            h_normal: 0.01,
            bilaplacian_order: 6,
            normal_order: 6,
        }
    }
}

impl StencilConfig {
    /// Every step multiplied by `s` (the fields' local length scale).
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            h: self.h * s,
            h_bilaplacian: self.h_bilaplacian * s,
            h_normal: self.h_normal * s,
            ..*self
        }
    }

    /// Wider normal steps with eighth-order boundary stencils, for fields
    /// that vary on unit scale everywhere near the boundary. Third-order
    /// boundary operators then amplify input roundoff about 30 times less
    /// than with the default, which matters when comparing fields that
    /// differ by a constant.
    pub fn wide() -> Self {
        Self {
            h_normal: 0.06,
            normal_order: 8,
            ..Self::default()
        }
    }

    /// Wide steps with no extrapolation: exact (up to roundoff) on
    /// low-degree polynomials.
    pub fn polynomial() -> Self {
        Self {
            h: 0.1,
            scheme_order: 4,
            richardson_levels: 0,
            one_sided_depth: 5,
            h_bilaplacian: 0.1,
            h_normal: 0.1,
            bilaplacian_order: 4,
            normal_order: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h_bilaplacian > 0.0 && self.h_normal > 0.0) {
            return Err(Error::Precondition("stencil steps must be positive".into()));
        }
        for o in [self.scheme_order, self.bilaplacian_order, self.normal_order] {
            if !matches!(o, 2 | 4 | 6 | 8) {
                return Err(Error::Precondition("stencil orders must be 2, 4, 6 or 8".into()));
            }
        }
        if self.richardson_levels > 3 {
            return Err(Error::Precondition("at most 3 Richardson levels".into()));
        }
        if self.one_sided_depth < 2 {
            return Err(Error::Precondition("one-sided stencils need at least 2 points".into()));
        }
        Ok(())
    }
}

/// Which way a 1D stencil extends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Central,
    /// Offsets `0, 1, 2, …` only.
    Forward,
}

/// Finite-difference weights for the `m`-th derivative at `z` from the
/// nodes `x` (Fornberg's algorithm).
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let np = x.len();
    assert!(np > m, "need more nodes than the derivative order");
    // c[j][k]: weight of node j for derivative k
    let mut c = vec![vec![0.0; m + 1]; np];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..np {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// A 1D stencil for unit step.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub order: usize,
    pub offsets: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Stencil {
    /// `m`-th derivative with truncation error `O(h^accuracy)`.
    pub fn new(m: usize, side: Side, accuracy: usize) -> Self {
        let offsets: Vec<f64> = match side {
            Side::Central => {
                let pts = m + accuracy - usize::from(m % 2 == 0);
                let k = pts / 2;
                (-(k as i64)..=k as i64).map(|o| o as f64).collect()
            }
            Side::Forward => (0..m + accuracy).map(|o| o as f64).collect(),
        };
        let mut weights = fd_weights(0.0, &offsets, m);
        if side == Side::Central {
            // exact (anti)symmetry
            let len = weights.len();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..len / 2 {
                let a = 0.5 * (weights[len - 1 - i] + sign * weights[i]);
                weights[len - 1 - i] = a;
                weights[i] = sign * a;
            }
            if m % 2 == 1 {
                weights[len / 2] = 0.0;
            }
        }
        Self {
            order: m,
            offsets,
            weights,
        }
    }

    /// Largest |offset|.
    pub fn reach(&self) -> f64 {
        self.offsets.iter().fold(0.0, |a: f64, o| a.max(libm::fabs(*o)))
    }
}

/// One factor of a tensor-product stencil: a direction and a 1D stencil.
struct Factor<'a> {
    dir: &'a [f64],
    stencil: Stencil,
}

fn map_eval_err(field: &dyn ScalarField, e: Error) -> Error {
    match e {
        Error::Singular(_) | Error::Domain(_) | Error::PolePoint | Error::Clearance(_) => Error::Clearance(format!(
            "stencil left the domain of field '{}': {e}",
            field.label()
        )),
        other => other,
    }
}

/// `Π_i (d/ds_i)^{m_i} f(p + h Σ s_i dir_i)` at `s = 0`.
fn tensor(field: &dyn ScalarField, p: &[f64], factors: &[Factor<'_>], h: f64) -> Result<f64> {
    let d = p.len();
    let mut idx = vec![0usize; factors.len()];
    let mut x = vec![0.0; d];
    let mut acc = NeumaierSum::new();
    let total_order: usize = factors.iter().map(|f| f.stencil.order).sum();
    'outer: loop {
        let mut w = 1.0;
        x.copy_from_slice(p);
        for (f, &i) in factors.iter().zip(&idx) {
            w *= f.stencil.weights[i];
            let o = f.stencil.offsets[i] * h;
            for k in 0..d {
                x[k] += o * f.dir[k];
            }
        }
        if w != 0.0 {
            let v = field.eval(&x).map_err(|e| map_eval_err(field, e))?;
            acc.add(w * v);
        }
        for (slot, f) in idx.iter_mut().zip(factors) {
            *slot += 1;
            if *slot < f.stencil.weights.len() {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    Ok(acc.sum() / libm::pow(h, total_order as f64))
}

/// Richardson extrapolation of `op(h), op(h/2), …` with leading error order
/// `p` raised by `inc` per level.
fn richardson(levels: u32, h: f64, p: u32, inc: u32, op: &mut dyn FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut table: Vec<f64> = Vec::with_capacity(levels as usize + 1);
    for l in 0..=levels {
        table.push(op(h / libm::pow(2.0, l as f64))?);
    }
    let mut order = p;
    for level in 1..=levels as usize {
        let f = libm::pow(2.0, order as f64);
        for i in (level..table.len()).rev() {
            table[i] = (f * table[i] - table[i - 1]) / (f - 1.0);
        }
        order += inc;
    }
    Ok(table[levels as usize])
}

fn check_point(field: &dyn ScalarField, p: &[f64]) -> Result<()> {
    if p.len() != field.dim() {
        return Err(Error::Precondition(format!(
            "point of dimension {} for a field of dimension {}",
            p.len(),
            field.dim()
        )));
    }
    match field.chart() {
        Chart::Sphere => Err(Error::ChartMismatch(
            "ambient operators need a ball, half-space or Euclidean field; use the tangential operators".into(),
        )),
        Chart::HalfSpace if p[p.len() - 1] < 0.0 => Err(Error::Precondition("half-space point with t < 0".into())),
        _ => Ok(()),
    }
}

/// Side used along axis `k` for a derivative of order `m` at step `h`.
fn axis_side(field: &dyn ScalarField, p: &[f64], k: usize, m: usize, acc: usize, h: f64) -> Side {
    let d = p.len();
    if field.chart() == Chart::HalfSpace && k == d - 1 {
        let reach = Stencil::new(m, Side::Central, acc).reach();
        if p[d - 1] < reach * h * (1.0 + 1e-12) {
            return Side::Forward;
        }
    }
    Side::Central
}

/// Generic mixed partial `Π ∂_{k}^{m_k}` along coordinate axes.
fn axis_partial(field: &dyn ScalarField, p: &[f64], orders: &[(usize, usize)], h: f64, acc: usize) -> Result<(f64, bool)> {
    let d = p.len();
    let axes: Vec<Vec<f64>> = orders.iter().map(|&(k, _)| unit(d, k)).collect();
    let mut one_sided = false;
    let factors: Vec<Factor<'_>> = orders
        .iter()
        .zip(&axes)
        .map(|(&(k, m), dir)| {
            let side = axis_side(field, p, k, m, acc, h);
            one_sided |= side == Side::Forward;
            Factor {
                dir,
                stencil: Stencil::new(m, side, acc),
            }
        })
        .collect();
    Ok((tensor(field, p, &factors, h)?, one_sided))
}

fn near_boundary(field: &dyn ScalarField, p: &[f64], m: usize, acc: usize, h: f64) -> bool {
    axis_side(field, p, p.len() - 1, m, acc, h) == Side::Forward
}

/// `Δf(p)` in ambient coordinates.
pub fn laplacian<F: ScalarField + ?Sized>(field: &F, p: &[f64], cfg: &StencilConfig) -> Result<f64> {
    let field: &dyn ScalarField = &field;
    cfg.validate()?;
    check_point(field, p)?;
    let acc = cfg.scheme_order as usize;
    let inc = if near_boundary(field, p, 2, acc, cfg.h) { 1 } else { 2 };
    richardson(cfg.richardson_levels, cfg.h, cfg.scheme_order, inc, &mut |h| laplacian_once(field, p, h, acc))
}

fn laplacian_once(field: &dyn ScalarField, p: &[f64], h: f64, acc: usize) -> Result<f64> {
    let mut s = NeumaierSum::new();
    for k in 0..p.len() {
        s.add(axis_partial(field, p, &[(k, 2)], h, acc)?.0);
    }
    Ok(s.sum())
}

/// `Δ²f(p) = Σ ∂_i⁴ f + 2 Σ_{i<j} ∂_i² ∂_j² f`, step `cfg.h_bilaplacian`,
/// accuracy `cfg.bilaplacian_order`.
pub fn bilaplacian<F: ScalarField + ?Sized>(field: &F, p: &[f64], cfg: &StencilConfig) -> Result<f64> {
    let field: &dyn ScalarField = &field;
    cfg.validate()?;
    check_point(field, p)?;
    let acc = cfg.bilaplacian_order as usize;
    let h = cfg.h_bilaplacian;
    let d = p.len();
    let mut s = NeumaierSum::new();
    for i in 0..d {
        s.add(axis_partial(field, p, &[(i, 4)], h, acc)?.0);
        for j in i + 1..d {
            s.add(2.0 * axis_partial(field, p, &[(i, 2), (j, 2)], h, acc)?.0);
        }
    }
    Ok(s.sum())
}

/// Ambient gradient.
pub fn gradient<F: ScalarField + ?Sized>(field: &F, p: &[f64], cfg: &StencilConfig) -> Result<Vec<f64>> {
    let field: &dyn ScalarField = &field;
    cfg.validate()?;
    check_point(field, p)?;
    let acc = cfg.scheme_order as usize;
    (0..p.len())
        .map(|k| {
            let inc = if field.chart() == Chart::HalfSpace && k + 1 == p.len() && near_boundary(field, p, 1, acc, cfg.h) {
                1
            } else {
                2
            };
            richardson(cfg.richardson_levels, cfg.h, cfg.scheme_order, inc, &mut |h| {
                Ok(axis_partial(field, p, &[(k, 1)], h, acc)?.0)
            })
        })
        .collect()
}

/// Boundary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalKind {
    /// `ηv = ∂_r v` on `S^n` (ball chart).
    EtaV,
    /// `η(Δv)` on `S^n` (ball chart).
    EtaDeltaV,
    /// `∂_t u` at `t = 0` (half-space chart).
    DtU,
    /// `∂_t(Δu)` at `t = 0` (half-space chart).
    DtDeltaU,
}

/// One-sided estimate of a boundary operator at a boundary point.
///
/// The first-order kinds use a `one_sided_depth`-point stencil pointing into
/// the domain. The third-order kinds expand `∂_ν Δ = ∂_ν³ + Σ_k ∂_ν ∂_{T_k}²`
/// in a frame `(ν, T_1, …, T_n)` and use forward stencils in `ν` only.
pub fn boundary_normal<F: ScalarField + ?Sized>(
    field: &F,
    point: &[f64],
    kind: NormalKind,
    cfg: &StencilConfig,
) -> Result<f64> {
    let field: &dyn ScalarField = &field;
    cfg.validate()?;
    if point.len() != field.dim() {
        return Err(Error::Precondition("boundary point dimension".into()));
    }
    let d = point.len();
    // inward direction and tangent frame; `sign` converts the inward
    // derivative of odd order to the outward/`+t` one
    let (inward, tangents, sign): (Vec<f64>, Vec<Vec<f64>>, f64) = match (kind, field.chart()) {
        (NormalKind::EtaV | NormalKind::EtaDeltaV, Chart::Ball) => {
            let r = norm(point);
            if libm::fabs(r - 1.0) > 1e-9 {
                return Err(Error::Precondition(format!("|ξ| = {r} is not on the unit sphere")));
            }
            let nu: Vec<f64> = point.iter().map(|x| x / r).collect();
            let tangents = orthonormal_complement(&nu);
            (nu.iter().map(|x| -x).collect(), tangents, -1.0)
        }
        (NormalKind::DtU | NormalKind::DtDeltaU, Chart::HalfSpace) => {
            if libm::fabs(point[d - 1]) > 1e-12 {
                return Err(Error::Precondition("half-space boundary point needs t = 0".into()));
            }
            ((unit(d, d - 1)), (0..d - 1).map(|k| unit(d, k)).collect(), 1.0)
        }
        (k, c) => return Err(Error::ChartMismatch(format!("{k:?} is not defined for a {c:?} field"))),
    };
    let acc = cfg.normal_order as usize;
    match kind {
        NormalKind::EtaV | NormalKind::DtU => {
            let depth = cfg.one_sided_depth;
            let v = richardson(cfg.richardson_levels, cfg.h_normal, (depth - 1) as u32, 1, &mut |h| {
                let f = Factor {
                    dir: &inward,
                    stencil: Stencil::new(1, Side::Forward, depth - 1),
                };
                tensor(field, point, &[f], h)
            })?;
            Ok(sign * v)
        }
        NormalKind::EtaDeltaV | NormalKind::DtDeltaU => {
            let v = richardson(cfg.richardson_levels, cfg.h_normal, cfg.normal_order, 1, &mut |h| {
                let mut s = NeumaierSum::new();
                s.add(tensor(
                    field,
                    point,
                    &[Factor {
                        dir: &inward,
                        stencil: Stencil::new(3, Side::Forward, acc),
                    }],
                    h,
                )?);
                for t in &tangents {
                    s.add(tensor(
                        field,
                        point,
                        &[
                            Factor {
                                dir: &inward,
                                stencil: Stencil::new(1, Side::Forward, acc),
                            },
                            Factor {
                                dir: t,
                                stencil: Stencil::new(2, Side::Central, acc),
                            },
                        ],
                        h,
                    )?);
                }
                Ok(s.sum())
            })?;
            Ok(sign * v)
        }
    }
}

/// The degree-0 homogeneous extension `X ↦ f(X/|X|)` of boundary data.
struct Homogeneous<'a> {
    f: &'a dyn ScalarField,
}

impl ScalarField for Homogeneous<'_> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn chart(&self) -> Chart {
        Chart::Euclidean
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        let r = norm(p);
        let q: Vec<f64> = p.iter().map(|x| x / r).collect();
        self.f.eval(&q)
    }
    fn label(&self) -> &str {
        self.f.label()
    }
}

fn check_sphere(f: &dyn ScalarField, xi: &[f64]) -> Result<()> {
    if xi.len() != f.dim() {
        return Err(Error::Precondition("sphere point dimension".into()));
    }
    if libm::fabs(norm(xi) - 1.0) > 1e-9 {
        return Err(Error::Precondition("tangential operators need |ξ| = 1".into()));
    }
    Ok(())
}

/// `Δ̄f(ξ)`, the Laplace–Beltrami operator of `S^n`, as the ambient Laplacian
/// of the homogeneous extension. Only the sphere values of `f` are used.
pub fn tangential_laplacian<F: ScalarField + ?Sized>(f: &F, xi: &[f64], cfg: &StencilConfig) -> Result<f64> {
    let f: &dyn ScalarField = &f;
    check_sphere(f, xi)?;
    laplacian(&Homogeneous { f }, xi, cfg)
}

/// `|∇̄f(ξ)|²` from the ambient gradient of the homogeneous extension.
pub fn tangential_gradient_sq<F: ScalarField + ?Sized>(f: &F, xi: &[f64], cfg: &StencilConfig) -> Result<f64> {
    let f: &dyn ScalarField = &f;
    check_sphere(f, xi)?;
    let g = gradient(&Homogeneous { f }, xi, cfg)?;
    Ok(crate::vector::norm_sq(&g))
}

/// Mean of `field` over the sphere `∂B_r(center)`, with `rule` a rule on the
/// unit sphere of the field's ambient space.
pub fn sphere_average<F: ScalarField + ?Sized>(
    field: &F,
    center: &[f64],
    r: f64,
    rule: &crate::quadrature::QuadRule,
) -> Result<f64> {
    use crate::quadrature::{Domain, Rule};
    let d = field.dim();
    if center.len() != d || rule.domain() != Domain::Sphere(d - 1) {
        return Err(Error::Precondition("sphere rule and center must match the field dimension".into()));
    }
    if !(r > 0.0) {
        return Err(Error::Precondition("radius must be positive".into()));
    }
    match field.chart() {
        Chart::HalfSpace if center[d - 1] - r < 0.0 => {
            return Err(Error::Clearance("sphere crosses t = 0".into()));
        }
        Chart::Ball if norm(center) + r > 1.0 => {
            return Err(Error::Clearance("sphere leaves the unit ball".into()));
        }
        Chart::Sphere => return Err(Error::ChartMismatch("sphere averages need an ambient field".into())),
        _ => {}
    }
    let mut x = vec![0.0; d];
    let mut s = NeumaierSum::new();
    rule.try_for_each(&mut |theta, w| {
        for k in 0..d {
            x[k] = center[k] + r * theta[k];
        }
        let v = field.eval(&x).map_err(|e| map_eval_err(&field, e))?;
        s.add(w * v);
        Ok(())
    })?;
    Ok(s.sum() / rule.total_weight())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{biharmonic_extension, halfspace_solution, HalfSpaceExtremalParams};
    use crate::field::FnField;
    use crate::quadrature::sphere_rule;
    use crate::vector::{dot, norm_sq};

    fn eucl4<F: Fn(&[f64]) -> f64>(f: F) -> FnField<F> {
        FnField::new(Chart::Euclidean, 4, f)
    }

    #[test]
    fn classical_weights() {
        let s = Stencil::new(2, Side::Central, 4);
        let e = [-1.0, 16.0, -30.0, 16.0, -1.0];
        for (w, e) in s.weights.iter().zip(e) {
            assert!((w - e / 12.0).abs() < 1e-14);
        }
        let s = Stencil::new(4, Side::Central, 2);
        for (w, e) in s.weights.iter().zip([1.0, -4.0, 6.0, -4.0, 1.0]) {
            assert!((w - e).abs() < 1e-13);
        }
        let s = Stencil::new(1, Side::Forward, 4);
        for (w, e) in s.weights.iter().zip([-25.0, 48.0, -36.0, 16.0, -3.0]) {
            assert!((w - e / 12.0).abs() < 1e-13);
        }
        let s = Stencil::new(1, Side::Central, 2);
        assert_eq!(s.weights, [-0.5, 0.0, 0.5]);
    }

    #[test]
    fn quadratic_laplacian_is_exact() {
        let f = eucl4(norm_sq);
        let l = laplacian(&f, &[0.3, -0.2, 1.0, 0.5], &StencilConfig::default()).unwrap();
        assert!((l - 8.0).abs() < 1e-9, "{l}");
    }

    #[test]
    fn bilaplacian_of_quartic() {
        let f = eucl4(|x| norm_sq(x) * norm_sq(x));
        let b = bilaplacian(&f, &[0.1, 0.2, -0.3, 0.4], &StencilConfig::polynomial()).unwrap();
        assert!((b - 192.0).abs() < 1e-8, "{b}");
    }

    #[test]
    fn halfspace_laplacian_at_the_boundary_is_one_sided() {
        // |X|² + t³: Δ = 8 + 6t; at t = 0 only t ≥ 0 may be sampled
        let f = FnField::new(Chart::HalfSpace, 4, |x: &[f64]| {
            assert!(x[3] >= 0.0, "sampled below t = 0");
            norm_sq(x) + x[3] * x[3] * x[3]
        });
        let l = laplacian(&f, &[0.5, 0.0, 0.0, 0.0], &StencilConfig::default()).unwrap();
        assert!((l - 8.0).abs() < 1e-7, "{l}");
        let b = bilaplacian(&f, &[0.0, 0.0, 0.0, 0.0], &StencilConfig::polynomial()).unwrap();
        assert!(b.abs() < 1e-8, "{b}");
    }

    #[test]
    fn u1_laplacian_at_origin() {
        // u1 = log(2/((1+t)²+|x|²)): Δu1 = -4/((1+t)²+|x|²)
        let u1 = FnField::new(Chart::HalfSpace, 4, |p: &[f64]| {
            libm::log(2.0 / ((1.0 + p[3]) * (1.0 + p[3]) + p[0] * p[0] + p[1] * p[1] + p[2] * p[2]))
        });
        let l = laplacian(&u1, &[0.0; 4], &StencilConfig::default()).unwrap();
        assert!((l + 4.0).abs() < 1e-7, "{l}");
    }

    #[test]
    fn dt_delta_u_of_the_bubble() {
        let u = halfspace_solution(HalfSpaceExtremalParams::new(&[0.0; 3], 1.0, 0.0)).unwrap();
        for x in [0.0, 1.0, 2.0] {
            let p = [x, 0.0, 0.0, 0.0];
            let v = boundary_normal(&u, &p, NormalKind::DtDeltaU, &StencilConfig::default()).unwrap();
            let exact = 32.0 / libm::pow(1.0 + x * x, 3.0);
            assert!((v - exact).abs() < 1e-5, "x={x}: {v} vs {exact}");
        }
    }

    #[test]
    fn cubic_in_t_has_zero_neumann_trace() {
        let f = FnField::new(Chart::HalfSpace, 4, |p: &[f64]| 2.0 / 3.0 * p[3] * p[3] * p[3]);
        let cfg = StencilConfig::polynomial();
        let p = [0.4, -1.0, 2.0, 0.0];
        assert!(boundary_normal(&f, &p, NormalKind::DtU, &cfg).unwrap().abs() < 1e-9);
        let v = boundary_normal(&f, &p, NormalKind::DtDeltaU, &cfg).unwrap();
        assert!((v - 4.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn extremal_neumann_trace_vanishes() {
        let v = biharmonic_extension(3, &[0.3, 0.1, 0.0, -0.2]).unwrap();
        let cfg = StencilConfig::default();
        for xi in [[1.0, 0.0, 0.0, 0.0], [0.0, 0.6, 0.0, 0.8], [0.5, 0.5, 0.5, -0.5]] {
            let e = boundary_normal(&v, &xi, NormalKind::EtaV, &cfg).unwrap();
            assert!(e.abs() < 1e-6, "{e}");
        }
    }

    #[test]
    fn kind_chart_mismatch() {
        let v = biharmonic_extension(3, &[0.0; 4]).unwrap();
        let e = boundary_normal(&v, &[1.0, 0.0, 0.0, 0.0], NormalKind::DtU, &StencilConfig::default());
        assert!(matches!(e, Err(Error::ChartMismatch(_))));
    }

    #[test]
    fn tangential_examples() {
        let f = FnField::new(Chart::Sphere, 4, |p: &[f64]| p[0]);
        let cfg = StencilConfig::default();
        let xi = [0.5, 0.5, -0.5, 0.5];
        let l = tangential_laplacian(&f, &xi, &cfg).unwrap();
        assert!((l + 3.0 * 0.5).abs() < 1e-7, "{l}");
        let g = tangential_gradient_sq(&f, &[0.0, 1.0, 0.0, 0.0], &cfg).unwrap();
        assert!((g - 1.0).abs() < 1e-7);
        let c = FnField::new(Chart::Sphere, 4, |_| 2.5);
        assert!(tangential_laplacian(&c, &xi, &cfg).unwrap().abs() < 1e-9);
        assert!(tangential_gradient_sq(&c, &xi, &cfg).unwrap().abs() < 1e-9);
    }

    #[test]
    fn zonal_eigenfunctions() {
        // degree-k zonal harmonics on S^3: Chebyshev U_k(ξ·e), eigenvalue -k(k+2)
        let cfg = StencilConfig::default();
        for k in 0..=4usize {
            let f = FnField::new(Chart::Sphere, 4, move |p: &[f64]| {
                let s = p[0];
                let th = libm::acos(s.clamp(-1.0, 1.0));
                if libm::fabs(libm::sin(th)) < 1e-12 {
                    (k + 1) as f64
                } else {
                    libm::sin((k + 1) as f64 * th) / libm::sin(th)
                }
            });
            let xi = [0.3, 0.5, -0.7, libm::sqrt(1.0 - 0.09 - 0.25 - 0.49)];
            let v = f.eval(&xi).unwrap();
            let l = tangential_laplacian(&f, &xi, &cfg).unwrap();
            assert!((l + (k * (k + 2)) as f64 * v).abs() < 1e-5, "k={k}: {l} vs {v}");
        }
    }

    #[test]
    fn sphere_average_examples() {
        let rule = sphere_rule(3, 6);
        let c = [0.2, -0.1, 0.4, 1.0];
        let f = eucl4(norm_sq);
        assert!((sphere_average(&f, &[0.0; 4], 1.0, &rule).unwrap() - 1.0).abs() < 1e-13);
        let g = eucl4(|x| x[0]);
        assert!((sphere_average(&g, &c, 0.7, &rule).unwrap() - 0.2).abs() < 1e-12);
        let k = eucl4(|_| -3.0);
        assert!((sphere_average(&k, &c, 2.0, &rule).unwrap() + 3.0).abs() < 1e-13);
        let h = FnField::new(Chart::HalfSpace, 4, |x: &[f64]| dot(x, x));
        assert!(matches!(sphere_average(&h, &[0.0, 0.0, 0.0, 0.5], 1.0, &rule), Err(Error::Clearance(_))));
    }

    #[test]
    fn halving_h_reduces_error() {
        let f = eucl4(|x| libm::sin(x[0]) * libm::exp(0.5 * x[1]) + libm::cos(x[2] * x[3]));
        let p = [0.3, 0.2, 0.7, -0.4];
        // exact Δ
        let exact = -libm::sin(p[0]) * libm::exp(0.5 * p[1]) + 0.25 * libm::sin(p[0]) * libm::exp(0.5 * p[1])
            - (p[2] * p[2] + p[3] * p[3]) * libm::cos(p[2] * p[3]);
        for order in [2u32, 4] {
            let cfg = |h| StencilConfig {
                h,
                scheme_order: order,
                richardson_levels: 0,
                ..Default::default()
            };
            let e1 = (laplacian(&f, &p, &cfg(0.1)).unwrap() - exact).abs();
            let e2 = (laplacian(&f, &p, &cfg(0.05)).unwrap() - exact).abs();
            assert!(e1 / e2 >= 0.8 * libm::pow(2.0, order as f64), "order {order}: {e1} {e2}");
        }
    }

    #[test]
    fn config_validation() {
        let bad = StencilConfig {
            scheme_order: 3,
            ..Default::default()
        };
        let f = eucl4(norm_sq);
        assert!(laplacian(&f, &[0.0; 4], &bad).is_err());
        let bad = StencilConfig {
            richardson_levels: 4,
            ..Default::default()
        };
        assert!(laplacian(&f, &[0.0; 4], &bad).is_err());
    }
}
