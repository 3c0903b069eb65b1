//! Campaign dispatch. Each campaign turns a resolved [`RunConfig`] into an
//! ordered list of checks; the order is fixed by the campaign, never by
//! timing.

pub mod ball;
pub mod halfspace;
pub mod kernels;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Campaign, RunConfig};
use crate::report::Check;

pub fn run(cfg: &RunConfig) -> Vec<Check> {
    log::info!("running {}", cfg.campaign);
    let checks = match cfg.campaign {
        Campaign::MobiusIdentity => halfspace::mobius_identity(cfg),
        Campaign::VerifyExtremal => ball::verify_extremal(cfg),
        Campaign::DeficitScan => ball::deficit_scan(cfg),
        Campaign::ResidualHalfspace => halfspace::residual_halfspace(cfg),
        Campaign::KernelCheck => kernels::kernel_check(cfg),
        Campaign::SpectralCompare => ball::spectral_compare(cfg),
        Campaign::EnergyIdentity => ball::energy_identity(cfg),
        Campaign::ElCheck => ball::el_check(cfg),
        Campaign::Pizzetti => halfspace::pizzetti(cfg),
    };
    for c in &checks {
        log::debug!("{}: {} (tolerance {}) {}", c.name, c.value, c.tolerance, if c.pass { "pass" } else { "FAIL" });
    }
    checks
}

/// Unwraps a group of checks, or records the error under `name`.
pub(crate) fn guard(name: &str, tol: f64, r: sobtrace_core::Result<Vec<Check>>) -> Vec<Check> {
    r.unwrap_or_else(|e| vec![Check::failed(name, tol, e)])
}

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction on `S^{d-1}` by rejection from the cube.
pub(crate) fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: f64 = p.iter().map(|x| x * x).sum();
        if r2 > 1e-4 && r2 <= 1.0 {
            let r = r2.sqrt();
            return p.into_iter().map(|x| x / r).collect();
        }
    }
}
