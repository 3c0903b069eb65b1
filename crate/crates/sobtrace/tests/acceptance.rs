//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (plus indented notes where a verdict needs context).
//! Tolerances are pinned here rather than taken from campaign defaults.

use std::io::Write;
use std::process::Command;

use sobtrace::campaigns::{ball, kernels};
use sobtrace::{execute, Campaign, Check, Overrides, Report, RunConfig};
use sobtrace_core::closed_forms::{biharmonic_extension_z, boundary_extremal};
use sobtrace_core::diffops::StencilConfig;
use sobtrace_core::field::{Affine, Combination, FnField};
use sobtrace_core::functionals::{deficit, DeficitRules};
use sobtrace_core::vector::norm_sq;
use sobtrace_core::Chart;

/// Written straight to stderr so the lines survive the test harness's
/// output capture and show up in plain `cargo test` logs. The leading
/// newline moves them off the harness's `test name ...` line.
fn say(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "\n{line}");
}

fn verdict(id: u32, title: &str, pass: bool, summary: &str) {
    say(&format!("acceptance {id:>2} {} {title}: {summary}", if pass { "PASS" } else { "FAIL" }));
}

fn note(text: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "              {text}");
}

fn config(campaign: Campaign, pairs: &[(&str, &str)]) -> RunConfig {
    let mut ov = Overrides::new();
    for (k, v) in pairs {
        ov.set(k, v).unwrap();
    }
    RunConfig::resolve(campaign, &ov).unwrap()
}

fn run(campaign: Campaign, pairs: &[(&str, &str)]) -> Report {
    execute(config(campaign, pairs), false)
}

fn value(r: &Report, name: &str) -> f64 {
    r.check(name).unwrap_or_else(|| panic!("no check {name}")).value
}

fn passes(checks: &[Check], names: &[&str]) -> bool {
    names.iter().all(|n| checks.iter().find(|c| c.name == *n).is_some_and(|c| c.pass))
}

fn worst(checks: &[Check], names: &[&str]) -> f64 {
    checks
        .iter()
        .filter(|c| names.contains(&c.name.as_str()))
        .fold(0.0f64, |m, c| if c.value.is_finite() { m.max(c.value.abs()) } else { f64::INFINITY })
}

fn e1(len: usize, x: f64) -> String {
    let mut v = vec!["0".to_string(); len];
    v[0] = x.to_string();
    v.join(",")
}

#[test]
fn criterion_01_mobius_identity() {
    let r = run(Campaign::MobiusIdentity, &[("trials", "1000"), ("seed", "1"), ("tol-identity", "1e-12")]);
    let v = value(&r, "identity_residual_max");
    verdict(1, "Möbius identity", r.pass, &format!("max |residual| {v:.2e} over 1000 samples (< 1e-12)"));
    assert!(r.pass, "{r:?}");
}

#[test]
fn criterion_02_ball_systems() {
    let tol = config(Campaign::VerifyExtremal, &[("tol-residual", "1e-5")]).tol;
    let mut ok = true;
    let mut sup: f64 = 0.0;
    for n in [3usize, 5, 6] {
        for r in [0.1, 0.3, 0.6] {
            let mut z0 = vec![0.0; n + 1];
            z0[0] = r;
            let checks = ball::extremal_system_checks(4, n, &z0, &StencilConfig::default(), &tol).unwrap();
            let names = ["interior", "neumann", "dirichlet"];
            sup = sup.max(worst(&checks, &names));
            if !passes(&checks, &names) {
                ok = false;
                note(&format!("n = {n}, |z0| = {r}: {checks:?}"));
            }
        }
    }
    verdict(2, "ball systems of the closed-form extremals", ok, &format!("largest residual {sup:.2e} over 9 cases (< 1e-5)"));
    assert!(ok);
}

#[test]
fn criterion_03_spectral_oracle() {
    let mut ok = true;
    let mut sup: f64 = 0.0;
    for n in [3usize, 5] {
        let z0 = e1(n + 1, 0.3);
        let r = run(Campaign::SpectralCompare, &[("z0", &z0), ("kmax", "40"), ("tol-spectral", "1e-8")]);
        sup = sup.max(worst(&r.checks, &["biharmonic_gap", "harmonic_gap"]));
        ok &= r.pass;
    }
    verdict(3, "spectral oracle vs closed forms", ok, &format!("sup gap {sup:.2e} for n = 3, 5 (< 1e-8)"));
    assert!(ok);
}

#[test]
fn criterion_04_equality_and_perturbations_n3() {
    let eq = run(
        Campaign::VerifyExtremal,
        &[("z0", "0.3,0,0,0"), ("res-sphere", "48"), ("res-radial", "64"), ("tol-deficit", "1e-6")],
    );
    let d = value(&eq, "deficit");
    let scan = run(Campaign::DeficitScan, &[("z0", "0.3,0,0,0"), ("trials", "100"), ("seed", "4"), ("tol-scan", "1e-8")]);
    let m = value(&scan, "min_deficit");
    let ok = eq.check("deficit").unwrap().pass && scan.check("min_deficit").unwrap().pass;
    verdict(
        4,
        "fourth-order equality case, n = 3",
        ok,
        &format!("|deficit| {:.2e} at 48x64 (< 1e-6); min over 100 perturbations {m:.2e} (>= -1e-8)", d.abs()),
    );
    assert!(ok, "{eq:?}\n{scan:?}");
}

#[test]
fn criterion_05_equality_n4_and_invariances() {
    let eq = run(Campaign::VerifyExtremal, &[("z0", "0.2,0,0,0,0"), ("tol-deficit", "1e-5")]);
    let d = value(&eq, "deficit");
    let cfg = StencilConfig::default();

    // homogeneity of the power case, on a perturbed admissible pair
    let z = [0.2, 0.0, 0.0, 0.0, 0.0];
    let f = boundary_extremal(4, 4, &z).unwrap();
    let v = biharmonic_extension_z(4, &z).unwrap();
    let bump = FnField::new(Chart::Ball, 5, |x: &[f64]| {
        let s = 1.0 - norm_sq(x);
        0.2 * s * s
    });
    let pert = Combination { first: &v, second: &bump, a: 1.0, b: 1.0, c: 0.0 };
    let rules = DeficitRules::new(4, 8, 8);
    let base = deficit(4, &f, &pert, &rules, &cfg).unwrap().deficit;
    let mut homog: f64 = 0.0;
    for k in [0.5, 2.0, 3.0] {
        let dk = deficit(4, &Affine::new(&f, k, 0.0), &Affine::new(&pert, k, 0.0), &rules, &cfg).unwrap().deficit;
        homog = homog.max((dk - k * k * base).abs() / (k * k * base).abs());
    }

    // constant shifts leave the n = 3 (logarithmic) deficit unchanged
    let z = [0.3, 0.0, 0.0, 0.0];
    let f = boundary_extremal(4, 3, &z).unwrap();
    let v = biharmonic_extension_z(3, &z).unwrap();
    let rules = DeficitRules::new(3, 12, 12);
    let base3 = deficit(4, &f, &v, &rules, &cfg).unwrap().deficit;
    let mut shift: f64 = 0.0;
    for k in [1.0, -1.0, 5.0, -5.0] {
        let dk = deficit(4, &Affine::new(&f, 1.0, k), &Affine::new(&v, 1.0, k), &rules, &cfg).unwrap().deficit;
        shift = shift.max((dk - base3).abs());
    }

    let ok = eq.check("deficit").unwrap().pass && homog < 1e-10 && shift < 1e-10;
    verdict(
        5,
        "fourth-order equality case, n = 4",
        ok,
        &format!(
            "|deficit| {:.2e} (< 1e-5); homogeneity {homog:.1e} rel, shift (n = 3) {shift:.1e} (< 1e-10)",
            d.abs()
        ),
    );
    assert!(ok, "{eq:?}");
}

#[test]
fn criterion_06_energy_identity() {
    let ext = run(Campaign::EnergyIdentity, &[("dim", "4"), ("z0", "0.2,0,0,0,0"), ("tol-energy", "1e-4")]);
    let one = run(Campaign::EnergyIdentity, &[("dim", "4"), ("field", "one"), ("tol-energy", "1e-4")]);
    let radial = run(Campaign::EnergyIdentity, &[("dim", "4"), ("field", "radial"), ("tol-energy", "1e-4")]);
    let g_ext = value(&ext, "relative_gap");
    let g_one = value(&one, "relative_gap");
    let ok = ext.check("relative_gap").unwrap().pass && one.check("relative_gap").unwrap().pass;
    verdict(
        6,
        "energy identity, n = 4",
        ok,
        &format!("relative gap {g_ext:.2e} for the extremal, {g_one:.2e} for v = 1 (< 1e-4)"),
    );
    if !ok {
        note(&format!(
            "v = 1 violates the Neumann condition the identity needs: |ηv + v/2| = {:.3} on S^4.",
            value(&one, "neumann")
        ));
        note("The half-space side is 4π², the ball side b_4|S^4| = 20π²/3.");
        note(&format!(
            "The admissible field with trace 1, v = 1 + (1-|X|²)/4, gives relative gap {:.2e}.",
            value(&radial, "relative_gap")
        ));
    }
    assert!(radial.pass && ext.pass, "{radial:?}\n{ext:?}");
    assert!(ok, "v = 1 is not admissible for the n = 4 energy identity");
}

#[test]
fn criterion_07_halfspace_family() {
    let mut ok = true;
    let mut sup: f64 = 0.0;
    let names = ["interior", "nonlinear", "neumann"];
    for a in ["0,0,0", "1,0,0"] {
        for lambda in ["1", "2"] {
            for c in ["0", "-1"] {
                let r = run(
                    Campaign::ResidualHalfspace,
                    &[("a", a), ("lambda", lambda), ("c", c), ("tol-residual", "1e-5")],
                );
                sup = sup.max(worst(&r.checks, &names));
                if !passes(&r.checks, &names) {
                    ok = false;
                    note(&format!("a = {a}, λ = {lambda}, c = {c}: {:?}", r.checks));
                }
            }
        }
    }
    let cubic = run(Campaign::ResidualHalfspace, &[("family", "cubic"), ("tol-counterexample", "1e-9")]);
    let cubic_res = worst(&cubic.checks, &names);
    let cubic_ok = passes(&cubic.checks, &names)
        && !cubic.check("boundary_volume_finite").unwrap().pass
        && !cubic.check("interior_volume_finite").unwrap().pass;
    let t2 = run(Campaign::ResidualHalfspace, &[("c", "1")]);
    let t2_ok = t2.check("boundary_volume_finite").unwrap().pass && !t2.check("interior_volume_finite").unwrap().pass;
    let all = ok && cubic_ok && t2_ok;
    verdict(
        7,
        "half-space solution family and counterexamples",
        all,
        &format!(
            "family residual {sup:.2e} (< 1e-5); (2/3)t³ residual {cubic_res:.1e} (< 1e-9) with both volumes divergent: {cubic_ok}; u + t² interior-only divergence: {t2_ok}"
        ),
    );
    assert!(all);
}

#[test]
fn criterion_08_exact_values() {
    let r = run(
        Campaign::ResidualHalfspace,
        &[("a", "0,0,0"), ("lambda", "1"), ("c", "0"), ("tol-laplacian", "1e-7"), ("tol-residual", "1e-5"), ("tol-volume", "1e-6")],
    );
    let names = ["laplacian_u1_at_center", "dt_laplacian_exact", "boundary_volume", "alpha"];
    let ok = passes(&r.checks, &names);
    verdict(
        8,
        "exact values for u_{0,1}",
        ok,
        &format!(
            "Δu₁(0,0) = {:.9}, ∂_tΔu error {:.1e}, boundary volume {:.9} (2π²), α = {:.9}",
            value(&r, "laplacian_u1_at_center"),
            value(&r, "dt_laplacian_exact"),
            value(&r, "boundary_volume"),
            value(&r, "alpha"),
        ),
    );
    assert!(ok, "{r:?}");
}

#[test]
fn criterion_09_kernels() {
    let tol = config(Campaign::KernelCheck, &[("tol-kernel", "1e-8")]).tol;
    let checks = kernels::normalization_checks(&tol).unwrap();
    let ok = checks.iter().all(|c| c.pass);
    let h = worst(
        &checks
            .iter()
            .filter(|c| !c.name.starts_with("literal"))
            .map(|c| Check { value: c.value - 1.0, ..c.clone() })
            .collect::<Vec<_>>(),
        &checks.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(),
    );
    let lit = checks.iter().find(|c| c.name == "literal_biharmonic_normalization_t2").unwrap().value;
    verdict(
        9,
        "Poisson kernel normalizations",
        ok,
        &format!("max |∫K - 1| {h:.1e} (< 1e-8) for t in 0.5, 1, 2; t¹ numerator at t = 2 integrates to {lit:.9} = t⁻²"),
    );
    assert!(ok, "{checks:?}");
}

#[test]
fn criterion_10_log_kernel_representation() {
    let tol = config(Campaign::KernelCheck, &[("tol-convolution", "1e-3")]).tol;
    let cfg = StencilConfig::default();
    let lemma = kernels::lemma31_checks(&[0.0; 3], 1.0, &cfg, &tol).unwrap();
    let lemma_ok = lemma.iter().all(|c| c.pass);
    let lemma_sup = worst(&lemma, &lemma.iter().map(|c| c.name.as_str()).collect::<Vec<_>>());

    let mut corollary_ok = true;
    let mut gaps = Vec::new();
    for (a, lambda) in [([0.0, 0.0, 0.0], 1.0), ([1.0, 0.0, 0.0], 2.0)] {
        let c = kernels::corollary_checks(&a, lambda, &cfg, &tol).unwrap();
        let literal = c.iter().find(|c| c.name == "corollary_worst_gap").unwrap();
        let after = c.iter().find(|c| c.name == "corollary_gap_after_offset").unwrap();
        corollary_ok &= literal.pass;
        gaps.push((a, lambda, literal.value, after.value));
    }
    let fit = kernels::quadratic_fit_checks(&[0.0; 3], 1.0, &tol).unwrap();
    let fit_ok = fit.iter().all(|c| c.pass);
    let c0 = fit.iter().find(|c| c.name == "fit_c0").unwrap().value;

    let ok = lemma_ok && corollary_ok && fit_ok;
    verdict(
        10,
        "log-kernel representation of u_{a,λ}",
        ok,
        &format!(
            "linear system residual {lemma_sup:.1e} (< 1e-3); corollary worst gaps {:.4}, {:.4} (< 1e-3); fit c0 {c0:.4} (|.| < 1e-3)",
            gaps[0].2, gaps[1].2
        ),
    );
    if !ok {
        note("The log-kernel field satisfies v(0,0) = 0 by construction, while u_{a,λ}(0,0) = log(2λ/(λ²+|a|²)).");
        note("So u - v is that constant: log 2 for (0,1), log 0.8 for (e1,2); zero only when λ² + |a|² = 2λ.");
        for (a, lambda, _, after) in &gaps {
            note(&format!("a = {a:?}, λ = {lambda}: gap after removing the constant {after:.1e}"));
        }
        let lit = run(Campaign::KernelCheck, &[("a", "0,0,0"), ("lambda", "2")]);
        note(&format!(
            "(a, λ) = (0, 2) has zero offset: corollary worst gap {:.1e}, fit c0 {:.1e}.",
            value(&lit, "corollary_worst_gap"),
            value(&lit, "fit_c0")
        ));
    }
    assert!(lemma_ok, "{lemma:?}");
    assert!(ok, "the literal representation u = v misses the constant log(2λ/(λ²+|a|²))");
}

#[test]
fn criterion_11_pizzetti() {
    let r = run(Campaign::Pizzetti, &[("dim", "3"), ("trials", "20"), ("seed", "11"), ("tol-pizzetti", "1e-9")]);
    verdict(
        11,
        "Pizzetti's formula",
        r.pass,
        &format!(
            "max gap {:.1e} over 20 biharmonic polynomials (< 1e-9); |X|⁴ control gap {:.6} = r⁴",
            value(&r, "biharmonic_gap_max"),
            value(&r, "quartic_control_gap")
        ),
    );
    assert!(r.pass, "{r:?}");
}

#[test]
fn criterion_12_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_sobtrace");
    let mut identical = true;
    for args in [
        vec!["mobius-identity", "--seed", "9"],
        vec!["pizzetti", "--seed", "9"],
        vec!["deficit-scan", "--seed", "9", "--trials", "3", "--res-sphere", "8", "--res-radial", "8"],
    ] {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let out = dir.path().join(format!("{}-{k}.json", args[0]));
            let status = Command::new(bin).args(&args).arg("--out").arg(&out).status().unwrap();
            assert!(status.code().is_some());
            outputs.push(std::fs::read(&out).unwrap());
        }
        identical &= outputs[0] == outputs[1];
    }
    verdict(12, "determinism", identical, "three campaigns rerun with the same seed give byte-identical JSON");
    assert!(identical);
}
