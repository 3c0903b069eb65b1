//! Closed-form extremals: boundary data on `S^n`, their harmonic and
//! biharmonic extensions to `B^{n+1}`, the half-space solution families,
//! and the chart transfer of scalar fields.
//!
//! All additive constants in the logarithmic families are fixed to zero.

use alloc::vec::Vec;

use crate::chart::{conformal_factor_from_sq, f_squared, mobius_into, omega_from_z};
use crate::field::{Chart, ScalarField};
use crate::vector::{dist_sq, dot, norm_sq};
use crate::{Error, Result};

fn check_center(v: &[f64], what: &str) -> Result<()> {
    if !(norm_sq(v) < 1.0) {
        return Err(Error::Domain(alloc::format!("|{what}| must be < 1")));
    }
    Ok(())
}

/// Boundary extremal on `S^n` of the order-2 or order-4 inequality.
///
/// * order 2, `n = 1` and order 4, `n = 3`: `f = -log|1 - ⟨z₀, ξ⟩|`
/// * order 2, `n > 1`: `f = |1 - ⟨z₀, ξ⟩|^{(1-n)/2}`
/// * order 4, `n > 3`: `f = |1 - ⟨z₀, ξ⟩|^{(3-n)/2}`
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryExtremal {
    order: u32,
    n: usize,
    z0: Vec<f64>,
}

/// Validate `(order, n)`: order 2 needs `n >= 1`, order 4 needs `n >= 3`.
pub fn check_order(order: u32, n: usize) -> Result<()> {
    match (order, n) {
        (2, n) if n >= 1 => Ok(()),
        (4, n) if n >= 3 => Ok(()),
        _ => Err(Error::Unsupported { order, n }),
    }
}

/// Whether the extremal of `(order, n)` is of logarithmic type.
pub fn is_log_case(order: u32, n: usize) -> bool {
    matches!((order, n), (2, 1) | (4, 3))
}

pub fn boundary_extremal(order: u32, n: usize, z0: &[f64]) -> Result<BoundaryExtremal> {
    check_order(order, n)?;
    if z0.len() != n + 1 {
        return Err(Error::Domain("z0 must have n+1 components".into()));
    }
    check_center(z0, "z0")?;
    Ok(BoundaryExtremal {
        order,
        n,
        z0: z0.to_vec(),
    })
}

impl BoundaryExtremal {
    pub fn order(&self) -> u32 {
        self.order
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn z0(&self) -> &[f64] {
        &self.z0
    }

    /// Value as a function of `s = ⟨z₀, ξ⟩` (the data is zonal about `z₀`).
    pub fn profile(&self, s: f64) -> f64 {
        let g = libm::fabs(1.0 - s);
        if is_log_case(self.order, self.n) {
            -libm::log(g)
        } else {
            let shift = if self.order == 2 { 1.0 } else { 3.0 };
            libm::pow(g, (shift - self.n as f64) / 2.0)
        }
    }
}

impl ScalarField for BoundaryExtremal {
    fn dim(&self) -> usize {
        self.n + 1
    }
    fn chart(&self) -> Chart {
        Chart::Sphere
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        Ok(self.profile(dot(&self.z0, p)))
    }
    fn label(&self) -> &str {
        "f"
    }
}

fn f2_checked(xi: &[f64], omega: &[f64]) -> Result<f64> {
    let f2 = f_squared(xi, omega);
    if !(f2 > 0.0) {
        return Err(Error::Singular("F(xi, omega0) = 0".into()));
    }
    Ok(f2)
}

/// Harmonic extension of the order-2 boundary extremal:
/// `v = -log F² + log(1 + |ω₀|²)` for `n = 1`,
/// `v = (1 + |ω₀|²)^{(n-1)/2} F^{1-n}` for `n > 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicExtension {
    n: usize,
    omega0: Vec<f64>,
    w2: f64,
}

pub fn harmonic_extension(n: usize, omega0: &[f64]) -> Result<HarmonicExtension> {
    if n < 1 || omega0.len() != n + 1 {
        return Err(Error::Domain("omega0 must have n+1 components, n >= 1".into()));
    }
    check_center(omega0, "omega0")?;
    Ok(HarmonicExtension {
        n,
        omega0: omega0.to_vec(),
        w2: norm_sq(omega0),
    })
}

impl ScalarField for HarmonicExtension {
    fn dim(&self) -> usize {
        self.n + 1
    }
    fn chart(&self) -> Chart {
        Chart::Ball
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        let f2 = f2_checked(p, &self.omega0)?;
        if self.n == 1 {
            Ok(-libm::log(f2) + libm::log1p(self.w2))
        } else {
            let e = (self.n as f64 - 1.0) / 2.0;
            Ok(libm::pow((1.0 + self.w2) / f2, e))
        }
    }
    fn label(&self) -> &str {
        "v"
    }
}

/// Biharmonic extension solving `Δ²v = 0`, `v = f`, `ηv = -(n-3)/2 · f`
/// with the order-4 extremal data `f`.
///
/// * `n = 3`: `v = -log F² + (1-|ξ|²)/2 · [(1-|ω₀|²)/F² - 1] + log(1+|ω₀|²)`
/// * `n > 3`: `v = (1+|ω₀|²)^{(n-3)/2} F^{3-n} [1 + (n-3)(1-|ω₀|²)(1-|ξ|²)/(4F²)]`
#[derive(Debug, Clone, PartialEq)]
pub struct BiharmonicExtension {
    n: usize,
    omega0: Vec<f64>,
    w2: f64,
}

pub fn biharmonic_extension(n: usize, omega0: &[f64]) -> Result<BiharmonicExtension> {
    if n < 3 {
        return Err(Error::Unsupported { order: 4, n });
    }
    if omega0.len() != n + 1 {
        return Err(Error::Domain("omega0 must have n+1 components".into()));
    }
    check_center(omega0, "omega0")?;
    Ok(BiharmonicExtension {
        n,
        omega0: omega0.to_vec(),
        w2: norm_sq(omega0),
    })
}

impl BiharmonicExtension {
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn omega0(&self) -> &[f64] {
        &self.omega0
    }
}

impl ScalarField for BiharmonicExtension {
    fn dim(&self) -> usize {
        self.n + 1
    }
    fn chart(&self) -> Chart {
        Chart::Ball
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        let f2 = f2_checked(p, &self.omega0)?;
        let one_m_r2 = 1.0 - norm_sq(p);
        let one_m_w2 = 1.0 - self.w2;
        if self.n == 3 {
            Ok(-libm::log(f2) + 0.5 * one_m_r2 * (one_m_w2 / f2 - 1.0) + libm::log1p(self.w2))
        } else {
            let m = self.n as f64 - 3.0;
            let base = libm::pow((1.0 + self.w2) / f2, m / 2.0);
            Ok(base * (1.0 + m * one_m_w2 * one_m_r2 / (4.0 * f2)))
        }
    }
    fn label(&self) -> &str {
        "v"
    }
}

/// Biharmonic extension parametrised by the boundary center `z₀`.
pub fn biharmonic_extension_z(n: usize, z0: &[f64]) -> Result<BiharmonicExtension> {
    biharmonic_extension(n, &omega_from_z(z0)?)
}

/// Harmonic extension parametrised by the boundary center `z₀`.
pub fn harmonic_extension_z(n: usize, z0: &[f64]) -> Result<HarmonicExtension> {
    harmonic_extension(n, &omega_from_z(z0)?)
}

/// Parameters of `u_{a,λ} + c t²`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceExtremalParams {
    pub a: Vec<f64>,
    pub lambda: f64,
    pub c: f64,
}

impl HalfSpaceExtremalParams {
    pub fn new(a: &[f64], lambda: f64, c: f64) -> Self {
        Self {
            a: a.to_vec(),
            lambda,
            c,
        }
    }
}

/// `u(x, t) = log(2λ/D) + 2tλ/D + c t²`, `D = (λ+t)² + |x-a|²`.
///
/// With `a ∈ R³` this is the finite-volume solution family of
/// `Δ²u = 0`, `∂_tΔu = 4e^{3u}`, `∂_tu = 0` on `R⁴_+`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceSolution {
    params: HalfSpaceExtremalParams,
}

pub fn halfspace_solution(params: HalfSpaceExtremalParams) -> Result<HalfSpaceSolution> {
    if !(params.lambda > 0.0) {
        return Err(Error::Domain("lambda must be > 0".into()));
    }
    if params.a.is_empty() {
        return Err(Error::Domain("a must have n >= 1 components".into()));
    }
    Ok(HalfSpaceSolution { params })
}

impl HalfSpaceSolution {
    pub fn params(&self) -> &HalfSpaceExtremalParams {
        &self.params
    }

    /// Boundary trace `u(x, 0) = log(2λ/(λ² + |x-a|²))`.
    pub fn boundary(&self, x: &[f64]) -> f64 {
        let l = self.params.lambda;
        libm::log(2.0 * l / (l * l + dist_sq(x, &self.params.a)))
    }
}

impl ScalarField for HalfSpaceSolution {
    fn dim(&self) -> usize {
        self.params.a.len() + 1
    }
    fn chart(&self) -> Chart {
        Chart::HalfSpace
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        let n = self.params.a.len();
        let t = p[n];
        let l = self.params.lambda;
        let d = (l + t) * (l + t) + dist_sq(&p[..n], &self.params.a);
        if !(d > 0.0) {
            return Err(Error::Singular("(x, t) = (a, -lambda)".into()));
        }
        Ok(libm::log(2.0 * l / d) + 2.0 * t * l / d + self.params.c * t * t)
    }
    fn label(&self) -> &str {
        "u"
    }
}

/// `U(x,t) = scale · (λ/D)^{(n-3)/2} [1 + (n-3) t λ / D]`, `D = (λ+t)² + |x-a|²`:
/// the positive solutions of `Δ²U = 0`, `∂_tΔU = c U^{(n+3)/(n-3)}`,
/// `∂_tU = 0` on `R^{n+1}_+`, `n > 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct SunSolution {
    a: Vec<f64>,
    lambda: f64,
    scale: f64,
    n: usize,
}

pub fn sun_solution(a: &[f64], lambda: f64, scale: f64, n: usize) -> Result<SunSolution> {
    if n <= 3 {
        return Err(Error::Domain("sun_solution needs n > 3".into()));
    }
    if a.len() != n {
        return Err(Error::Domain("a must have n components".into()));
    }
    if !(lambda > 0.0) || !(scale > 0.0) {
        return Err(Error::Domain("lambda and scale must be > 0".into()));
    }
    Ok(SunSolution {
        a: a.to_vec(),
        lambda,
        scale,
        n,
    })
}

impl SunSolution {
    /// The constant `c` in `∂_tΔU = c U^{(n+3)/(n-3)}`:
    /// `2(n-3)(n-1)(n+1) · scale^{1-(n+3)/(n-3)}`, independent of `a, λ`.
    pub fn nonlinearity_constant(&self) -> f64 {
        let n = self.n as f64;
        let p = (n + 3.0) / (n - 3.0);
        2.0 * (n - 3.0) * (n - 1.0) * (n + 1.0) * libm::pow(self.scale, 1.0 - p)
    }
}

impl ScalarField for SunSolution {
    fn dim(&self) -> usize {
        self.n + 1
    }
    fn chart(&self) -> Chart {
        Chart::HalfSpace
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        let n = self.n;
        let t = p[n];
        let l = self.lambda;
        let d = (l + t) * (l + t) + dist_sq(&p[..n], &self.a);
        if !(d > 0.0) {
            return Err(Error::Singular("(x, t) = (a, -lambda)".into()));
        }
        let m = n as f64 - 3.0;
        Ok(self.scale * libm::pow(l / d, m / 2.0) * (1.0 + m * t * l / d))
    }
    fn label(&self) -> &str {
        "U"
    }
}

/// How a field is carried across the Möbius map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferMode {
    /// Multiply by `(2/|P + e|²)^{(n-3)/2}`; conformal weight of the
    /// `n > 3` problem.
    WeightPower,
    /// `w = v∘S + (1 - |S(X)|²)/2 + log(2/|X+e|²)` and its inverse; the
    /// `n = 3` problem.
    AdditiveLog,
}

/// A ball field pulled back to the half-space, or a half-space field pushed
/// to the ball.
#[derive(Debug, Clone)]
pub struct Transferred<F> {
    inner: F,
    mode: TransferMode,
    target: Chart,
}

pub fn transfer_field<F: ScalarField>(field: F, mode: TransferMode) -> Result<Transferred<F>> {
    let n = field.dim() - 1;
    match mode {
        TransferMode::WeightPower if n <= 3 => {
            return Err(Error::Domain("weight_power transfer needs n > 3".into()))
        }
        TransferMode::AdditiveLog if n != 3 => {
            return Err(Error::Domain("additive_log transfer needs n = 3".into()))
        }
        _ => {}
    }
    let target = match field.chart() {
        Chart::Ball => Chart::HalfSpace,
        Chart::HalfSpace => Chart::Ball,
        other => {
            return Err(Error::ChartMismatch(alloc::format!(
                "cannot transfer a field on {other:?}"
            )))
        }
    };
    Ok(Transferred {
        inner: field,
        mode,
        target,
    })
}

impl<F> Transferred<F> {
    pub fn inner(&self) -> &F {
        &self.inner
    }
}

const POLE_EPS: f64 = 1e-24;

impl<F: ScalarField> ScalarField for Transferred<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn chart(&self) -> Chart {
        self.target
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        let d = p.len();
        let mut q = alloc::vec![0.0; d];
        // |p + e|² ; for a ball source p is the half-space point X
        let a = mobius_into(p, &mut q);
        if self.target == Chart::Ball && a < POLE_EPS {
            return Err(Error::Singular("pole xi = -e_(n+1)".into()));
        }
        let cf = conformal_factor_from_sq(a);
        let inner = self.inner.eval(&q)?;
        match self.mode {
            TransferMode::WeightPower => {
                Ok(inner * libm::pow(cf, (d as f64 - 4.0) / 2.0))
            }
            TransferMode::AdditiveLog => {
                // |ξ|² where ξ is the ball-side point of the pair (p, q)
                let xi2 = if self.target == Chart::HalfSpace { norm_sq(&q) } else { norm_sq(p) };
                let sign = if self.target == Chart::HalfSpace { 1.0 } else { -1.0 };
                Ok(inner + sign * 0.5 * (1.0 - xi2) + libm::log(cf))
            }
        }
    }
    fn label(&self) -> &str {
        match self.target {
            Chart::HalfSpace => match self.mode {
                TransferMode::WeightPower => "U",
                TransferMode::AdditiveLog => "w",
            },
            _ => "v",
        }
    }
}
