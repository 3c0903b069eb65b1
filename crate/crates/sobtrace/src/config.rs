//! Run configuration: raw `key = value` overrides from a config file and the
//! command line, resolved against per-campaign defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use sobtrace_core::closed_forms::check_order;
use sobtrace_core::diffops::StencilConfig;

use crate::ConfigError;

/// Named verification campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Campaign {
    MobiusIdentity,
    VerifyExtremal,
    DeficitScan,
    ResidualHalfspace,
    KernelCheck,
    SpectralCompare,
    EnergyIdentity,
    ElCheck,
    Pizzetti,
}

impl Campaign {
    pub fn name(self) -> &'static str {
        match self {
            Campaign::MobiusIdentity => "mobius-identity",
            Campaign::VerifyExtremal => "verify-extremal",
            Campaign::DeficitScan => "deficit-scan",
            Campaign::ResidualHalfspace => "residual-halfspace",
            Campaign::KernelCheck => "kernel-check",
            Campaign::SpectralCompare => "spectral-compare",
            Campaign::EnergyIdentity => "energy-identity",
            Campaign::ElCheck => "el-check",
            Campaign::Pizzetti => "pizzetti",
        }
    }
}

impl fmt::Display for Campaign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Half-space field examined by `residual-halfspace`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `u_{a,λ} + c t²`.
    Bubble,
    /// `(2/3) t³`.
    Cubic,
}

/// Ball field examined by `energy-identity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyField {
    /// Biharmonic extension centred at `z0`.
    Extremal,
    /// `v ≡ 1`.
    One,
    /// `1 + (n−3)(1−|X|²)/4`, the constant-data extremal.
    Radial,
}

/// Tolerances, one per kind of check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub identity: f64,
    pub residual: f64,
    pub consistency: f64,
    pub deficit: f64,
    pub scan: f64,
    pub spectral: f64,
    pub kernel: f64,
    pub convolution: f64,
    pub energy: f64,
    pub volume: f64,
    pub laplacian: f64,
    pub counterexample: f64,
    pub el: f64,
    pub shift: f64,
    pub pizzetti: f64,
}

/// Fully resolved run configuration. This is what the report echoes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub campaign: Campaign,
    pub order: u32,
    /// Boundary dimension `n`.
    pub dim: usize,
    pub z0: Vec<f64>,
    pub a: Vec<f64>,
    pub lambda: f64,
    pub c: f64,
    pub family: Family,
    pub field: EnergyField,
    pub kmax: usize,
    pub trials: usize,
    pub seed: u64,
    pub res_sphere: usize,
    pub res_radial: usize,
    pub fd_h: f64,
    pub tol: Tolerances,
}

const TOL_KEYS: [&str; 15] = [
    "identity",
    "residual",
    "consistency",
    "deficit",
    "scan",
    "spectral",
    "kernel",
    "convolution",
    "energy",
    "volume",
    "laplacian",
    "counterexample",
    "el",
    "shift",
    "pizzetti",
];

const KEYS: [&str; 14] = [
    "order",
    "dim",
    "z0",
    "a",
    "lambda",
    "c",
    "family",
    "field",
    "kmax",
    "trials",
    "seed",
    "res-sphere",
    "res-radial",
    "fd-h",
];

/// Raw string overrides, later entries winning.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    map: BTreeMap<String, String>,
}

impl Overrides {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `key` (underscores and dashes are interchangeable). Unknown keys
    /// are rejected here so typos in config files surface immediately.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().replace('_', "-");
        let known = KEYS.contains(&key.as_str())
            || key.strip_prefix("tol-").is_some_and(|k| TOL_KEYS.contains(&k));
        if !known {
            return Err(ConfigError::UnknownKey(key));
        }
        self.map.insert(key, value.trim().to_string());
        Ok(())
    }

    pub fn with(mut self, key: &str, value: &str) -> Result<Self, ConfigError> {
        self.set(key, value)?;
        Ok(self)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    /// Flat `key = value` text. Blank lines and `#` comments are skipped.
    pub fn parse_file_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: line.to_string(),
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        self.parse_file_text(&text)
    }

    fn parse<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|_| ConfigError::Value {
                key: key.to_string(),
                expected: what.to_string(),
                got: s.to_string(),
            }),
        }
    }

    fn vector(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(s) = self.get(key) else { return Ok(None) };
        s.split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
            .map_err(|_| ConfigError::Value {
                key: key.to_string(),
                expected: "a comma-separated list of numbers".into(),
                got: s.to_string(),
            })
    }
}

fn invalid(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: msg.into(),
    }
}

fn e1(len: usize, x: f64) -> Vec<f64> {
    let mut v = vec![0.0; len];
    if len > 0 {
        v[0] = x;
    }
    v
}

impl RunConfig {
    /// Resolve `campaign` against `ov`, filling in defaults and rejecting
    /// inconsistent or unsupported combinations.
    pub fn resolve(campaign: Campaign, ov: &Overrides) -> Result<Self, ConfigError> {
        use Campaign::*;
        let order = ov.parse::<u32>("order", "2 or 4")?.unwrap_or(4);
        let z0_in = ov.vector("z0")?;
        let a_in = ov.vector("a")?;
        let dim_in = ov.parse::<usize>("dim", "a positive integer")?;

        // Dimension: explicit flag, else inferred from the vector flags.
        let inferred = match campaign {
            ResidualHalfspace | KernelCheck | MobiusIdentity => a_in.as_ref().map(|a| a.len()),
            _ => z0_in.as_ref().map(|z| z.len().saturating_sub(1)),
        };
        let default_dim = if campaign == EnergyIdentity { 4 } else { 3 };
        let dim = dim_in.or(inferred).unwrap_or(default_dim);
        if let (Some(d), Some(i)) = (dim_in, inferred) {
            if d != i {
                return Err(invalid("dim", format!("--dim {d} contradicts the length of the vector flags (n = {i})")));
            }
        }
        if dim == 0 {
            return Err(invalid("dim", "the boundary dimension must be at least 1"));
        }
        match campaign {
            VerifyExtremal => check_order(order, dim).map_err(|e| invalid("order", e.to_string()))?,
            DeficitScan | SpectralCompare => {
                if order != 4 {
                    return Err(invalid("order", format!("{campaign} works with the fourth-order problem only")));
                }
                check_order(order, dim).map_err(|e| invalid("order", e.to_string()))?
            }
            EnergyIdentity if dim <= 3 => {
                return Err(invalid("dim", "the energy identity is stated for n > 3"));
            }
            ElCheck | ResidualHalfspace | KernelCheck if dim != 3 => {
                return Err(invalid("dim", format!("{campaign} is defined for n = 3 only")));
            }
            _ => {}
        }

        let z0 = z0_in.unwrap_or_else(|| e1(dim + 1, if campaign == EnergyIdentity { 0.2 } else { 0.3 }));
        if z0.len() != dim + 1 {
            return Err(invalid("z0", format!("expected {} components for n = {dim}", dim + 1)));
        }
        if z0.iter().map(|x| x * x).sum::<f64>() >= 1.0 {
            return Err(invalid("z0", "the centre must lie in the open unit ball"));
        }
        let a = a_in.unwrap_or_else(|| vec![0.0; dim]);
        if a.len() != dim {
            return Err(invalid("a", format!("expected {dim} components")));
        }
        let lambda = ov.parse::<f64>("lambda", "a positive number")?.unwrap_or(1.0);
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", "must be a positive number"));
        }
        let c = ov.parse::<f64>("c", "a number")?.unwrap_or(0.0);
        let family = match ov.get("family") {
            None | Some("bubble") => Family::Bubble,
            Some("cubic") => Family::Cubic,
            Some(s) => return Err(invalid("family", format!("expected bubble or cubic, got '{s}'"))),
        };
        let field = match ov.get("field") {
            None | Some("extremal") => EnergyField::Extremal,
            Some("one") => EnergyField::One,
            Some("radial") => EnergyField::Radial,
            Some(s) => return Err(invalid("field", format!("expected extremal, one or radial, got '{s}'"))),
        };
        let kmax = ov.parse::<usize>("kmax", "a non-negative integer")?.unwrap_or(40);
        let trials = ov.parse::<usize>("trials", "a positive integer")?.unwrap_or(match campaign {
            MobiusIdentity => 1000,
            Pizzetti => 20,
            _ => 100,
        });
        if trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        let seed = ov.parse::<u64>("seed", "a non-negative integer")?.unwrap_or(0);

        let (rs, rr) = match campaign {
            VerifyExtremal if order == 4 && dim == 3 => (48, 64),
            VerifyExtremal if order == 4 => (12, 16),
            VerifyExtremal => (24, 32),
            DeficitScan => (12, 12),
            EnergyIdentity => (6, 8),
            ElCheck => (16, 16),
            ResidualHalfspace => (24, 48),
            _ => (16, 16),
        };
        let res_sphere = ov.parse::<usize>("res-sphere", "a positive integer")?.unwrap_or(rs);
        let res_radial = ov.parse::<usize>("res-radial", "a positive integer")?.unwrap_or(rr);
        if res_sphere < 2 || res_radial < 2 {
            return Err(invalid("res-sphere", "resolutions must be at least 2"));
        }
        let fd_h = ov.parse::<f64>("fd-h", "a positive number")?.unwrap_or(StencilConfig::default().h);
        if !(fd_h > 0.0 && fd_h < 0.5) {
            return Err(invalid("fd-h", "must lie in (0, 0.5)"));
        }

        let mut tol = Tolerances {
            identity: 1e-12,
            residual: 1e-5,
            consistency: 1e-12,
            deficit: if order == 4 && dim == 3 { 1e-6 } else { 1e-5 },
            scan: 1e-8,
            spectral: 1e-8,
            kernel: 1e-8,
            convolution: 1e-3,
            energy: 1e-4,
            volume: 1e-6,
            laplacian: 1e-7,
            counterexample: 1e-9,
            el: 1e-4,
            shift: 1e-8,
            pizzetti: 1e-9,
        };
        for key in TOL_KEYS {
            let full = format!("tol-{key}");
            if let Some(v) = ov.parse::<f64>(&full, "a positive number")? {
                if !(v > 0.0) {
                    return Err(invalid(&full, "must be positive"));
                }
                let slot = match key {
                    "identity" => &mut tol.identity,
                    "residual" => &mut tol.residual,
                    "consistency" => &mut tol.consistency,
                    "deficit" => &mut tol.deficit,
                    "scan" => &mut tol.scan,
                    "spectral" => &mut tol.spectral,
                    "kernel" => &mut tol.kernel,
                    "convolution" => &mut tol.convolution,
                    "energy" => &mut tol.energy,
                    "volume" => &mut tol.volume,
                    "laplacian" => &mut tol.laplacian,
                    "counterexample" => &mut tol.counterexample,
                    "el" => &mut tol.el,
                    "shift" => &mut tol.shift,
                    _ => &mut tol.pizzetti,
                };
                *slot = v;
            }
        }

        Ok(Self {
            campaign,
            order,
            dim,
            z0,
            a,
            lambda,
            c,
            family,
            field,
            kmax,
            trials,
            seed,
            res_sphere,
            res_radial,
            fd_h,
            tol,
        })
    }

    /// Stencil configuration with the `fd-h` override applied.
    pub fn stencil(&self) -> StencilConfig {
        StencilConfig {
            h: self.fd_h,
            ..StencilConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_is_inferred_from_vectors() {
        let ov = Overrides::new().with("z0", "0.1, 0, 0, 0, 0, 0").unwrap();
        let c = RunConfig::resolve(Campaign::VerifyExtremal, &ov).unwrap();
        assert_eq!(c.dim, 5);
        assert_eq!(c.tol.deficit, 1e-5);
    }

    #[test]
    fn unsupported_order_is_rejected() {
        let ov = Overrides::new().with("order", "4").unwrap().with("dim", "2").unwrap();
        let e = RunConfig::resolve(Campaign::VerifyExtremal, &ov).unwrap_err();
        assert!(e.to_string().contains("order"), "{e}");
    }

    #[test]
    fn contradictory_flags_are_rejected() {
        let ov = Overrides::new().with("dim", "4").unwrap().with("z0", "0.3,0,0,0").unwrap();
        assert!(RunConfig::resolve(Campaign::VerifyExtremal, &ov).is_err());
    }

    #[test]
    fn file_text_overrides() {
        let mut ov = Overrides::new();
        ov.parse_file_text("# scan\nseed = 7\ntol_scan=1e-9\n\ntrials = 3 # few\n").unwrap();
        let c = RunConfig::resolve(Campaign::DeficitScan, &ov).unwrap();
        assert_eq!((c.seed, c.trials, c.tol.scan), (7, 3, 1e-9));
        assert!(matches!(ov.parse_file_text("seed 7"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(ov.set("sead", "1"), Err(ConfigError::UnknownKey(_))));
    }

    #[test]
    fn bad_numbers_name_the_key() {
        let ov = Overrides::new().with("z0", "0.3,x,0,0").unwrap();
        let e = RunConfig::resolve(Campaign::VerifyExtremal, &ov).unwrap_err();
        assert!(e.to_string().contains("z0"));
    }
}
