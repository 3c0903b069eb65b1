//! Möbius transfer between the upper half-space `R^{n+1}_+ = {(x, t) : t >= 0}`
//! and the unit ball `B^{n+1}`, the `ω₀ ↔ z₀` reparametrisation of the
//! extremal centers, and the function `F(ξ, ω)`.
//!
//! The map `S(X) = 2(X + e)/|X + e|² - e`, `e = e_{n+1}`, sends the closed
//! half-space onto the closed ball minus `-e`, and the same formula inverts
//! it. The last coordinate is always the distinguished one (`t` on the
//! half-space side, `ξ_{n+1}` on the ball side).

use alloc::vec::Vec;

use crate::vector::{dot, norm_sq};
use crate::{Error, Result};

/// Which model a [`ChartPoint`] lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointChart {
    Ball,
    HalfSpace,
}

/// A point of `B^{n+1}` or `R^{n+1}_+`; `n = coords.len() - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    chart: PointChart,
    coords: Vec<f64>,
}

const BALL_SLACK: f64 = 4.0 * f64::EPSILON;

impl ChartPoint {
    pub fn half_space(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Domain("half-space point needs n >= 1".into()));
        }
        let t = coords[coords.len() - 1];
        if !(t >= 0.0) {
            return Err(Error::Domain("half-space point with t < 0".into()));
        }
        Ok(Self {
            chart: PointChart::HalfSpace,
            coords,
        })
    }

    /// `(x, t)` with `x ∈ R^n`.
    pub fn from_xt(x: &[f64], t: f64) -> Result<Self> {
        let mut c = x.to_vec();
        c.push(t);
        Self::half_space(c)
    }

    pub fn ball(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Domain("ball point needs n >= 1".into()));
        }
        if norm_sq(&coords) > 1.0 + BALL_SLACK {
            return Err(Error::Domain("ball point outside the closed unit ball".into()));
        }
        Ok(Self {
            chart: PointChart::Ball,
            coords,
        })
    }

    pub fn chart(&self) -> PointChart {
        self.chart
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Boundary dimension `n`.
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    /// Last coordinate (`t` or `ξ_{n+1}`).
    pub fn last(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }
}

/// `2(p + e)/|p + e|² - e`, written into `out`. Returns `|p + e|²`.
#[inline]
pub fn mobius_into(p: &[f64], out: &mut [f64]) -> f64 {
    let d = p.len();
    let last = p[d - 1] + 1.0;
    let a = norm_sq(&p[..d - 1]) + last * last;
    let s = 2.0 / a;
    for i in 0..d - 1 {
        out[i] = s * p[i];
    }
    out[d - 1] = s * last - 1.0;
    a
}

/// The Möbius involution on raw coordinates (no chart checks).
pub fn mobius(p: &[f64]) -> Vec<f64> {
    let mut out = alloc::vec![0.0; p.len()];
    mobius_into(p, &mut out);
    out
}

/// `S: R^{n+1}_+ → B^{n+1}`.
pub fn mobius_to_ball(x: &ChartPoint) -> Result<ChartPoint> {
    if x.chart != PointChart::HalfSpace {
        return Err(Error::ChartMismatch("mobius_to_ball expects a half-space point".into()));
    }
    Ok(ChartPoint {
        chart: PointChart::Ball,
        coords: mobius(&x.coords),
    })
}

/// `S^{-1}: B^{n+1} \ {-e} → R^{n+1}_+`.
pub fn mobius_to_halfspace(xi: &ChartPoint) -> Result<ChartPoint> {
    if xi.chart != PointChart::Ball {
        return Err(Error::ChartMismatch("mobius_to_halfspace expects a ball point".into()));
    }
    let d = xi.coords.len();
    let last = xi.coords[d - 1] + 1.0;
    if norm_sq(&xi.coords[..d - 1]) + last * last == 0.0 {
        return Err(Error::PolePoint);
    }
    let mut coords = mobius(&xi.coords);
    // |ξ| <= 1 maps to t >= 0; clear the sign of a rounding-level negative zero.
    if coords[d - 1] < 0.0 && coords[d - 1] > -BALL_SLACK {
        coords[d - 1] = 0.0;
    }
    Ok(ChartPoint {
        chart: PointChart::HalfSpace,
        coords,
    })
}

/// Conformal factor `2/|X + e|²` of `S^*|dξ|² = (2/|X+e|²)² |dX|²`.
pub fn conformal_factor(x: &[f64]) -> f64 {
    let d = x.len();
    let last = x[d - 1] + 1.0;
    2.0 / (norm_sq(&x[..d - 1]) + last * last)
}

/// Conformal factor `2/a` given `a = |P + e|²` (as returned by [`mobius_into`]).
#[inline]
pub fn conformal_factor_from_sq(a: f64) -> f64 {
    2.0 / a
}

/// `ω₀ = z₀ (1 - √(1 - |z₀|²)) / |z₀|²`, evaluated as `z₀ / (1 + √(1 - |z₀|²))`.
pub fn omega_from_z(z0: &[f64]) -> Result<Vec<f64>> {
    let r2 = norm_sq(z0);
    if !(r2 < 1.0) {
        return Err(Error::Domain("|z0| must be < 1".into()));
    }
    let s = 1.0 / (1.0 + libm::sqrt(1.0 - r2));
    Ok(z0.iter().map(|z| z * s).collect())
}

/// `z₀ = 2ω₀ / (1 + |ω₀|²)`.
pub fn z_from_omega(omega0: &[f64]) -> Result<Vec<f64>> {
    let r2 = norm_sq(omega0);
    if !(r2 < 1.0) {
        return Err(Error::Domain("|omega0| must be < 1".into()));
    }
    let s = 2.0 / (1.0 + r2);
    Ok(omega0.iter().map(|w| w * s).collect())
}

/// `F(ξ, ω)² = |ω|²|ξ|² - 2 ω·ξ + 1`, the continuous extension of
/// `|ξ/|ξ| - |ξ| ω|²` to `ξ = 0`.
#[inline]
pub fn f_squared(xi: &[f64], omega: &[f64]) -> f64 {
    norm_sq(omega) * norm_sq(xi) - 2.0 * dot(omega, xi) + 1.0
}

/// Extremal center in both parametrisations.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterParams {
    pub z0: Vec<f64>,
    pub omega0: Vec<f64>,
    /// `(a, λ)` with `ω₀ = S(a, λ)`, when the center came from the half-space.
    pub halfspace: Option<(Vec<f64>, f64)>,
}

impl CenterParams {
    pub fn from_z0(z0: &[f64]) -> Result<Self> {
        Ok(Self {
            omega0: omega_from_z(z0)?,
            z0: z0.to_vec(),
            halfspace: None,
        })
    }

    pub fn from_omega0(omega0: &[f64]) -> Result<Self> {
        Ok(Self {
            z0: z_from_omega(omega0)?,
            omega0: omega0.to_vec(),
            halfspace: None,
        })
    }

    /// Center `ω₀ = S(a, λ)` for half-space parameters `a ∈ R^n`, `λ > 0`.
    pub fn from_halfspace(a: &[f64], lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Domain("lambda must be > 0".into()));
        }
        let mut p = a.to_vec();
        p.push(lambda);
        let omega0 = mobius(&p);
        let mut me = Self::from_omega0(&omega0)?;
        me.halfspace = Some((a.to_vec(), lambda));
        Ok(me)
    }

    /// `(a, λ) = S^{-1}(ω₀)`.
    pub fn halfspace_params(&self) -> Result<(Vec<f64>, f64)> {
        if let Some((a, l)) = &self.halfspace {
            return Ok((a.clone(), *l));
        }
        let p = mobius_to_halfspace(&ChartPoint::ball(self.omega0.clone())?)?;
        let lambda = p.last();
        let mut a = p.into_coords();
        a.pop();
        Ok((a, lambda))
    }
}

/// Residual of the half-space/ball identity
/// `λ/(|x-a|² + (t+λ)²) = (1-|ω|²)/4 · |ξ+e|²/F(ξ,ω)²`
/// with `ξ = S(X)`, `ω = S(a, λ)`.
pub fn identity_residual(a: &[f64], lambda: f64, x: &ChartPoint) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain("lambda must be > 0".into()));
    }
    if x.chart != PointChart::HalfSpace || a.len() + 1 != x.coords.len() {
        return Err(Error::ChartMismatch("identity_residual expects X in R^{n+1}_+ and a in R^n".into()));
    }
    let n = a.len();
    let xs = &x.coords[..n];
    let t = x.coords[n];
    let lhs = lambda / (crate::vector::dist_sq(xs, a) + (t + lambda) * (t + lambda));

    let xi = mobius(&x.coords);
    let mut al = a.to_vec();
    al.push(lambda);
    let omega = mobius(&al);
    let mut xe = xi.clone();
    xe[n] += 1.0;
    let rhs = (1.0 - norm_sq(&omega)) / 4.0 * norm_sq(&xe) / f_squared(&xi, &omega);
    Ok(lhs - rhs)
}
