//! Quadrature on intervals, spheres `S^n`, balls `B^{n+1}` and the
//! compactified spaces `R^n`, `R^{n+1}_+`.
//!
//! Every reduction runs in a fixed node order through [`NeumaierSum`], so
//! two runs over the same rule are bit-identical.

mod convolution;
mod gauss;

pub use convolution::{
    convolve, log_kernel_integrate, ConvolutionConfig, Density, LogKernelField, Refined,
};
pub use gauss::{gauss_jacobi_symmetric, gauss_legendre_on};

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::sum::NeumaierSum;
use crate::{Error, Result, ScalarField};

/// Integration domain tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// A 1D interval.
    Interval,
    /// The unit sphere `S^n ⊂ R^{n+1}`.
    Sphere(usize),
    /// The upper hemisphere of `S^n` (last coordinate ≥ 0).
    Hemisphere(usize),
    /// The unit ball in `R^d` (payload is the ambient dimension `d`).
    Ball(usize),
    /// All of `R^n`.
    Euclidean(usize),
    /// `R^d_+` (payload is the ambient dimension `d`, last coordinate `t ≥ 0`).
    HalfSpace(usize),
}

impl Domain {
    /// Ambient dimension of the nodes.
    pub fn ambient_dim(self) -> usize {
        match self {
            Domain::Interval => 1,
            Domain::Sphere(n) | Domain::Hemisphere(n) => n + 1,
            Domain::Ball(d) | Domain::Euclidean(d) | Domain::HalfSpace(d) => d,
        }
    }
}

/// Resolution parameters a rule was built with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RuleMeta {
    /// Angular (sphere) resolution.
    pub res: usize,
    /// Radial resolution; 0 for rules without a radial factor.
    pub res_radial: usize,
}

/// Anything that can enumerate weighted nodes in a fixed order.
pub trait Rule {
    fn domain(&self) -> Domain;

    fn meta(&self) -> RuleMeta;

    /// Number of nodes.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Visit every node in the fixed order. The callback may abort with an
    /// error, which is returned unchanged.
    fn try_for_each(&self, f: &mut dyn FnMut(&[f64], f64) -> Result<()>) -> Result<()>;

    /// Compensated sum of the weights.
    fn total_weight(&self) -> f64 {
        let mut s = NeumaierSum::new();
        let _ = self.try_for_each(&mut |_, w| {
            s.add(w);
            Ok(())
        });
        s.sum()
    }
}

/// A materialized rule: flat node storage plus weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    domain: Domain,
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    meta: RuleMeta,
}

impl QuadRule {
    pub fn new(domain: Domain, dim: usize, nodes: Vec<f64>, weights: Vec<f64>, meta: RuleMeta) -> Self {
        assert_eq!(nodes.len(), dim * weights.len(), "node storage mismatch");
        Self {
            domain,
            dim,
            nodes,
            weights,
            meta,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.dim)
    }
}

impl Rule for QuadRule {
    fn domain(&self) -> Domain {
        self.domain
    }
    fn meta(&self) -> RuleMeta {
        self.meta
    }
    fn len(&self) -> usize {
        self.weights.len()
    }
    fn try_for_each(&self, f: &mut dyn FnMut(&[f64], f64) -> Result<()>) -> Result<()> {
        for (x, w) in self.nodes.chunks_exact(self.dim).zip(&self.weights) {
            f(x, *w)?;
        }
        Ok(())
    }
}

/// A lazily iterated product `center + r·θ` of a radial rule and a rule on
/// directions. Radial weights already carry the `r^{d-1}` Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductRule {
    domain: Domain,
    center: Vec<f64>,
    radial: Vec<(f64, f64)>,
    directions: QuadRule,
    meta: RuleMeta,
}

impl ProductRule {
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radial(&self) -> &[(f64, f64)] {
        &self.radial
    }

    pub fn directions(&self) -> &QuadRule {
        &self.directions
    }

    /// Copy of this rule translated so that the origin of the radial
    /// coordinate sits at `center`.
    pub fn recentred(&self, center: &[f64]) -> Self {
        assert_eq!(center.len(), self.center.len());
        Self {
            center: center.to_vec(),
            ..self.clone()
        }
    }

    /// Materialize all nodes (only sensible for modest resolutions).
    pub fn materialize(&self) -> QuadRule {
        let d = self.center.len();
        let mut nodes = Vec::with_capacity(d * self.len());
        let mut weights = Vec::with_capacity(self.len());
        let _ = self.try_for_each(&mut |x, w| {
            nodes.extend_from_slice(x);
            weights.push(w);
            Ok(())
        });
        QuadRule::new(self.domain, d, nodes, weights, self.meta)
    }
}

impl Rule for ProductRule {
    fn domain(&self) -> Domain {
        self.domain
    }
    fn meta(&self) -> RuleMeta {
        self.meta
    }
    fn len(&self) -> usize {
        self.radial.len() * self.directions.len()
    }
    fn try_for_each(&self, f: &mut dyn FnMut(&[f64], f64) -> Result<()>) -> Result<()> {
        let d = self.center.len();
        let mut x = vec![0.0; d];
        for &(r, wr) in &self.radial {
            for (theta, wt) in self.directions.nodes().zip(self.directions.weights()) {
                for k in 0..d {
                    x[k] = self.center[k] + r * theta[k];
                }
                f(&x, wr * wt)?;
            }
        }
        Ok(())
    }
}

/// The `m`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> QuadRule {
    let (x, w) = gauss_jacobi_symmetric(m, 0.0);
    QuadRule::new(
        Domain::Interval,
        1,
        x,
        w,
        RuleMeta {
            res: m,
            res_radial: 0,
        },
    )
}

/// Product rule on `S^n ⊂ R^{n+1}`.
///
/// `S^0` is the pair `{±1}`; `S^1` uses `2·res` equispaced angles (exact on
/// trigonometric polynomials of degree `< 2·res`); for `n ≥ 2` the last
/// coordinate `s = ξ_{n+1}` carries the measure `(1-s²)^{(n-2)/2} ds`, which
/// is integrated by the matching `res`-point Gauss–Gegenbauer rule, times the
/// rule on `S^{n-1}` for the remaining coordinates.
pub fn sphere_rule(n: usize, res: usize) -> QuadRule {
    assert!(res >= 1, "sphere resolution must be positive");
    let (nodes, weights) = sphere_nodes(n, res, false);
    QuadRule::new(
        Domain::Sphere(n),
        n + 1,
        nodes,
        weights,
        RuleMeta { res, res_radial: 0 },
    )
}

/// Product rule on the closed upper hemisphere of `S^n` (`ξ_{n+1} ≥ 0`),
/// using Gauss–Legendre in the polar angle from `e_{n+1}` with weight
/// `sin^{n-1}θ`, times the rule on `S^{n-1}`.
pub fn hemisphere_rule(n: usize, res: usize) -> QuadRule {
    assert!(n >= 1 && res >= 1);
    let (nodes, weights) = sphere_nodes(n, res, true);
    QuadRule::new(
        Domain::Hemisphere(n),
        n + 1,
        nodes,
        weights,
        RuleMeta { res, res_radial: 0 },
    )
}

fn sphere_nodes(n: usize, res: usize, upper_half: bool) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return if upper_half {
            (vec![1.0], vec![1.0])
        } else {
            (vec![-1.0, 1.0], vec![1.0, 1.0])
        };
    }
    if n == 1 {
        let m = 2 * res;
        let (lo, span) = if upper_half { (0.0, PI) } else { (0.0, 2.0 * PI) };
        let mut nodes = Vec::with_capacity(2 * m);
        let mut weights = Vec::with_capacity(m);
        if upper_half {
            let (th, w) = gauss_legendre_on(m, lo, span);
            for (t, w) in th.iter().zip(&w) {
                nodes.push(libm::cos(*t));
                nodes.push(libm::sin(*t));
                weights.push(*w);
            }
        } else {
            for i in 0..m {
                let t = lo + span * (i as f64 + 0.5) / m as f64;
                nodes.push(libm::cos(t));
                nodes.push(libm::sin(t));
                weights.push(span / m as f64);
            }
        }
        return (nodes, weights);
    }
    let (sub_nodes, sub_w) = sphere_nodes(n - 1, res, false);
    // (s, sqrt(1-s²), weight) for the last coordinate
    let outer: Vec<(f64, f64, f64)> = if upper_half {
        let (th, w) = gauss_legendre_on(res, 0.0, FRAC_PI_2);
        th.iter()
            .zip(&w)
            .map(|(t, w)| {
                let st = libm::sin(*t);
                (libm::cos(*t), st, w * libm::pow(st, (n - 1) as f64))
            })
            .collect()
    } else {
        let (s, w) = gauss_jacobi_symmetric(res, (n as f64 - 2.0) / 2.0);
        s.iter()
            .zip(&w)
            .map(|(s, w)| (*s, libm::sqrt((1.0 - s * s).max(0.0)), *w))
            .collect()
    };
    let m = sub_w.len();
    let mut nodes = Vec::with_capacity(outer.len() * m * (n + 1));
    let mut weights = Vec::with_capacity(outer.len() * m);
    for &(s, c, w) in &outer {
        for (eta, we) in sub_nodes.chunks_exact(n).zip(&sub_w) {
            nodes.extend(eta.iter().map(|e| c * e));
            nodes.push(s);
            weights.push(w * we);
        }
    }
    (nodes, weights)
}

/// Product rule on `B^{n+1}`: `res_r` Gauss–Legendre radii on `[0,1]` with
/// weight `r^n`, times [`sphere_rule`]`(n, res_s)`.
pub fn ball_rule(n: usize, res_r: usize, res_s: usize) -> ProductRule {
    let (r, w) = gauss_legendre_on(res_r, 0.0, 1.0);
    let radial = r
        .iter()
        .zip(&w)
        .map(|(r, w)| (*r, w * libm::pow(*r, n as f64)))
        .collect();
    ProductRule {
        domain: Domain::Ball(n + 1),
        center: vec![0.0; n + 1],
        radial,
        directions: sphere_rule(n, res_s),
        meta: RuleMeta {
            res: res_s,
            res_radial: res_r,
        },
    }
}

/// Rule on `R^n` (`Domain::Euclidean(n)`) or `R^{n+1}_+`
/// (`Domain::HalfSpace(n+1)`) via `r = scale·tan(s)`, `s ∈ [0, π/2)`, with
/// `2·res` Gauss–Legendre nodes in `s`, times the sphere (resp. upper
/// hemisphere) rule of resolution `res`. The radial origin is `center`
/// (for the half-space, `center` must lie on `t = 0`).
pub fn compactified_rule(domain: Domain, res: usize) -> Result<ProductRule> {
    compactified_rule_at(domain, 2 * res, res, None, 1.0)
}

/// [`compactified_rule`] with explicit radial/angular resolutions, center and
/// length scale.
pub fn compactified_rule_at(
    domain: Domain,
    res_radial: usize,
    res_sphere: usize,
    center: Option<&[f64]>,
    scale: f64,
) -> Result<ProductRule> {
    if res_radial < 1 || res_sphere < 1 || !(scale > 0.0) {
        return Err(Error::Precondition("compactified rule needs positive resolutions and scale".into()));
    }
    let (d, directions) = match domain {
        Domain::Euclidean(n) if n >= 1 => (n, sphere_rule(n - 1, res_sphere)),
        Domain::HalfSpace(d) if d >= 2 => (d, hemisphere_rule(d - 1, res_sphere)),
        other => {
            return Err(Error::Precondition(alloc::format!(
                "no compactified rule for {other:?}"
            )))
        }
    };
    let c = match center {
        Some(c) => {
            if c.len() != d {
                return Err(Error::Precondition("center has the wrong dimension".into()));
            }
            if matches!(domain, Domain::HalfSpace(_)) && c[d - 1] != 0.0 {
                return Err(Error::Precondition("half-space rule must be centred on t = 0".into()));
            }
            c.to_vec()
        }
        None => vec![0.0; d],
    };
    Ok(ProductRule {
        domain,
        center: c,
        radial: tan_radial(res_radial, scale, d),
        directions,
        meta: RuleMeta {
            res: res_sphere,
            res_radial,
        },
    })
}

/// Radial nodes `r = L tan s` with weights `L sec²s · r^{d-1}`.
pub(crate) fn tan_radial(m: usize, scale: f64, d: usize) -> Vec<(f64, f64)> {
    let (s, w) = gauss_legendre_on(m, 0.0, FRAC_PI_2);
    s.iter()
        .zip(&w)
        .map(|(s, w)| {
            let c = libm::cos(*s);
            let r = scale * libm::tan(*s);
            (r, w * scale / (c * c) * libm::pow(r, (d - 1) as f64))
        })
        .collect()
}

/// Deterministic compensated `Σ w_i g(x_i)`.
pub fn integrate<R, G>(rule: &R, mut g: G) -> Result<f64>
where
    R: Rule + ?Sized,
    G: FnMut(&[f64]) -> Result<f64>,
{
    let mut s = NeumaierSum::new();
    rule.try_for_each(&mut |x, w| {
        let v = g(x)?;
        s.add(w * v);
        Ok(())
    })?;
    Ok(s.sum())
}

/// [`integrate`] for a [`ScalarField`].
pub fn integrate_field<R: Rule + ?Sized, F: ScalarField + ?Sized>(rule: &R, field: &F) -> Result<f64> {
    if field.dim() != rule.domain().ambient_dim() {
        return Err(Error::ChartMismatch(alloc::format!(
            "field of dimension {} on a rule over {:?}",
            field.dim(),
            rule.domain()
        )));
    }
    integrate(rule, |x| field.eval(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ball_volume, sphere_area};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn gauss_legendre_examples() {
        let r = gauss_legendre(1);
        assert_eq!(r.node(0), [0.0]);
        assert!((r.weights()[0] - 2.0).abs() < 1e-15);
        let r = gauss_legendre(3);
        let v = integrate(&r, |x| Ok(libm::pow(x[0], 4.0))).unwrap();
        assert!((v - 0.4).abs() < 1e-14);
    }

    #[test]
    fn sphere_totals() {
        for n in 0..=7 {
            for res in [2usize, 5, 8] {
                let r = sphere_rule(n, res);
                assert!(rel(r.total_weight(), sphere_area(n)) < 1e-10, "n={n} res={res}");
                assert!(r.weights().iter().all(|w| *w > 0.0));
                for x in r.nodes() {
                    assert!((crate::vector::norm(x) - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn hemisphere_is_half() {
        for n in 1..=5 {
            let r = hemisphere_rule(n, 12);
            assert!(rel(r.total_weight(), sphere_area(n) / 2.0) < 1e-10);
            assert!(r.nodes().all(|x| x[n] >= 0.0));
        }
    }

    #[test]
    fn s3_second_moment() {
        let r = sphere_rule(3, 6);
        let v = integrate(&r, |x| Ok(x[0] * x[0])).unwrap();
        assert!((v - PI * PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn ball_volumes() {
        for n in 1..=5 {
            let b = ball_rule(n, 6, 4);
            assert!(rel(b.total_weight(), ball_volume(n)) < 1e-10);
        }
        let b = ball_rule(3, 8, 6);
        assert!((b.total_weight() - PI * PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn ball_polynomial_moment() {
        // ∫_{B^4} |x|^2 = |S^3|/6
        let b = ball_rule(3, 4, 4);
        let v = integrate(&b, |x| Ok(crate::vector::norm_sq(x))).unwrap();
        assert!(rel(v, 2.0 * PI * PI / 6.0) < 1e-13);
    }

    #[test]
    fn compactified_r3_examples() {
        let r = compactified_rule(Domain::Euclidean(3), 32).unwrap();
        let v = integrate(&r, |x| Ok(libm::pow(1.0 + crate::vector::norm_sq(x), -3.0))).unwrap();
        assert!((v - PI * PI / 4.0).abs() < 1e-8);
        let u = |x: &[f64]| 2.0 / (1.0 + crate::vector::norm_sq(x));
        let v = integrate(&r, |x| Ok(libm::pow(u(x), 3.0))).unwrap();
        assert!((v - 2.0 * PI * PI).abs() < 1e-6);
    }

    #[test]
    fn compactified_halfspace_gaussian() {
        // ∫_{R^4_+} e^{-|X|²} = π²/2
        let r = compactified_rule(Domain::HalfSpace(4), 24).unwrap();
        let v = integrate(&r, |x| Ok(libm::exp(-crate::vector::norm_sq(x)))).unwrap();
        assert!(rel(v, PI * PI / 2.0) < 1e-9);
    }

    #[test]
    fn recentred_and_scaled() {
        let c = [1.0, -2.0, 0.5];
        let r = compactified_rule_at(Domain::Euclidean(3), 64, 24, Some(&c), 3.0).unwrap();
        let v = integrate(&r, |x| {
            Ok(libm::exp(-crate::vector::dist_sq(x, &[1.5, -2.0, 0.0])))
        })
        .unwrap();
        assert!(rel(v, libm::pow(PI, 1.5)) < 1e-9);
    }

    #[test]
    fn halfspace_center_must_be_on_boundary() {
        assert!(compactified_rule_at(Domain::HalfSpace(4), 8, 4, Some(&[0.0, 0.0, 0.0, 1.0]), 1.0).is_err());
        assert!(compactified_rule(Domain::Sphere(3), 4).is_err());
    }

    #[test]
    fn singular_nodes_propagate() {
        let r = sphere_rule(2, 4);
        let e = integrate(&r, |_| Err(Error::Singular("pole".into())));
        assert!(matches!(e, Err(Error::Singular(_))));
    }

    #[test]
    fn field_dimension_is_checked() {
        let f = crate::field::FnField::new(crate::Chart::Ball, 3, |_| 1.0);
        assert!(integrate_field(&sphere_rule(3, 3), &f).is_err());
        assert!((integrate_field(&sphere_rule(2, 3), &f).unwrap() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn materialized_product_matches_lazy() {
        let b = ball_rule(2, 3, 3);
        let m = b.materialize();
        assert_eq!(m.len(), b.len());
        let g = |x: &[f64]| Ok(libm::exp(x[0]) * x[2] * x[2]);
        assert_eq!(integrate(&b, g).unwrap(), integrate(&m, g).unwrap());
    }
}
