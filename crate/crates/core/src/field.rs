//! Scalar fields over one chart.

use alloc::string::String;

use crate::Result;

/// The chart a field lives on.
///
/// `HalfSpace` fields are only sampled at `t >= 0`: finite-difference
/// stencils that would cross `t = 0` switch to one-sided formulas in `t`.
/// `Ball` fields may be sampled in a thin shell outside the unit sphere
/// (every family in this crate extends analytically across `S^n`); a field
/// that cannot be evaluated there returns an error and the operator reports
/// a clearance failure. `Sphere` fields are boundary data and are only ever
/// evaluated at unit vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Ball,
    HalfSpace,
    Sphere,
    Euclidean,
}

/// A real-valued function on a chart of ambient dimension [`ScalarField::dim`].
pub trait ScalarField {
    /// Ambient dimension (`n + 1` for ball and half-space fields, `n + 1`
    /// for boundary data on `S^n`, `n` for densities on `R^n`).
    fn dim(&self) -> usize;

    fn chart(&self) -> Chart;

    /// Evaluate at `p` (`p.len() == self.dim()`).
    ///
    /// Points of the singular set return [`crate::Error::Singular`].
    fn eval(&self, p: &[f64]) -> Result<f64>;

    /// Short role label ("f", "v", "u", "w", "U").
    fn label(&self) -> &str {
        ""
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn chart(&self) -> Chart {
        (**self).chart()
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        (**self).eval(p)
    }
    fn label(&self) -> &str {
        (**self).label()
    }
}

impl<T: ScalarField + ?Sized> ScalarField for alloc::boxed::Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn chart(&self) -> Chart {
        (**self).chart()
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        (**self).eval(p)
    }
    fn label(&self) -> &str {
        (**self).label()
    }
}

/// A field backed by a closure.
#[derive(Clone)]
pub struct FnField<F> {
    dim: usize,
    chart: Chart,
    label: String,
    f: F,
}

impl<F> core::fmt::Debug for FnField<F> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FnField")
            .field("dim", &self.dim)
            .field("chart", &self.chart)
            .field("label", &self.label)
            .finish()
    }
}

impl<F: Fn(&[f64]) -> f64> FnField<F> {
    pub fn new(chart: Chart, dim: usize, f: F) -> Self {
        Self {
            dim,
            chart,
            label: String::new(),
            f,
        }
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }
}

impl<F: Fn(&[f64]) -> f64> ScalarField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn chart(&self) -> Chart {
        self.chart
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        Ok((self.f)(p))
    }
    fn label(&self) -> &str {
        &self.label
    }
}

/// Pointwise `a·F + b·G + c` of two fields on the same chart.
#[derive(Debug, Clone)]
pub struct Combination<F, G> {
    pub first: F,
    pub second: G,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl<F: ScalarField, G: ScalarField> ScalarField for Combination<F, G> {
    fn dim(&self) -> usize {
        self.first.dim()
    }
    fn chart(&self) -> Chart {
        self.first.chart()
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        Ok(self.a * self.first.eval(p)? + self.b * self.second.eval(p)? + self.c)
    }
}

/// `κ·F + shift`.
#[derive(Debug, Clone)]
pub struct Affine<F> {
    pub inner: F,
    pub scale: f64,
    pub shift: f64,
}

impl<F> Affine<F> {
    pub fn new(inner: F, scale: f64, shift: f64) -> Self {
        Self {
            inner,
            scale,
            shift,
        }
    }
}

impl<F: ScalarField> ScalarField for Affine<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn chart(&self) -> Chart {
        self.inner.chart()
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        Ok(self.scale * self.inner.eval(p)? + self.shift)
    }
    fn label(&self) -> &str {
        self.inner.label()
    }
}

/// Restriction of a ball field to `S^n`: evaluates the inner field at
/// `p / |p|`.
#[derive(Debug, Clone)]
pub struct SphereTrace<F>(pub F);

impl<F: ScalarField> ScalarField for SphereTrace<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn chart(&self) -> Chart {
        Chart::Sphere
    }
    fn eval(&self, p: &[f64]) -> Result<f64> {
        let r = crate::vector::norm(p);
        if r == 0.0 {
            return Err(crate::Error::Singular("trace at the origin".into()));
        }
        let q: alloc::vec::Vec<f64> = p.iter().map(|x| x / r).collect();
        self.0.eval(&q)
    }
    fn label(&self) -> &str {
        "f"
    }
}
