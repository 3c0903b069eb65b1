//! Extremal functions of the sharp second- and fourth-order Sobolev trace
//! inequalities on the unit ball `B^{n+1}` and the upper half-space
//! `R^{n+1}_+`, together with the numerical machinery used to check them:
//! Möbius chart transfer, closed-form extremals, finite-difference operators,
//! product and compactified quadrature, inequality functionals, PDE
//! residuals, half-space kernels and a zonal spectral solver.
//!
//! The crate is `no_std` and only needs `alloc`. All transcendental functions
//! come from `libm`, so results are identical across targets.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod chart;
pub mod closed_forms;
pub mod diffops;
mod error;
pub mod field;
pub mod functionals;
pub mod kernels;
pub mod linalg;
pub mod quadrature;
pub mod residuals;
pub mod sampling;
pub mod spectral;
pub mod sum;
pub mod vector;

pub use error::{Error, Result};
pub use field::{Chart, ScalarField};

/// `|S^n| = 2 π^{(n+1)/2} / Γ((n+1)/2)`.
pub fn sphere_area(n: usize) -> f64 {
    let h = (n as f64 + 1.0) / 2.0;
    2.0 * libm::pow(core::f64::consts::PI, h) / libm::tgamma(h)
}

/// `|B^{n+1}| = |S^n| / (n+1)`.
pub fn ball_volume(n: usize) -> f64 {
    sphere_area(n) / (n as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn areas() {
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
        assert!((ball_volume(3) - PI * PI / 2.0).abs() < 1e-13);
    }
}
