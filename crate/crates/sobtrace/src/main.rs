use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use sobtrace::{execute, Campaign, ConfigError, Overrides, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Verify the extremal functions of the sharp Sobolev trace inequalities.
///
/// Vector flags are comma-separated (`--z0 0.3,0,0,0`); the dimension is
/// inferred from their length. A config file of `key = value` lines sets
/// the same keys as the flags (without the dashes); flags win.
#[derive(Debug, Parser)]
#[command(name = "sobtrace", version)]
struct Cli {
    campaign: Campaign,

    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Record wall time in `elapsed_ms` (otherwise 0, for reproducible reports).
    #[arg(long)]
    timing: bool,

    /// Inequality order (2 or 4).
    #[arg(long, allow_hyphen_values = true)]
    order: Option<String>,
    /// Boundary dimension n.
    #[arg(long, allow_hyphen_values = true)]
    dim: Option<String>,
    /// Extremal centre in the unit ball (n+1 components).
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<String>,
    /// Half-space centre (n components).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Coefficient of t² in the half-space family.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// residual-halfspace field: bubble or cubic.
    #[arg(long)]
    family: Option<String>,
    /// energy-identity field: extremal, one or radial.
    #[arg(long)]
    field: Option<String>,
    /// Spectral truncation degree.
    #[arg(long)]
    kmax: Option<String>,
    /// Number of random samples or perturbations.
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    res_sphere: Option<String>,
    #[arg(long)]
    res_radial: Option<String>,
    /// Base finite-difference step.
    #[arg(long)]
    fd_h: Option<String>,

    #[arg(long)]
    tol_identity: Option<String>,
    #[arg(long)]
    tol_residual: Option<String>,
    #[arg(long)]
    tol_consistency: Option<String>,
    #[arg(long)]
    tol_deficit: Option<String>,
    #[arg(long)]
    tol_scan: Option<String>,
    #[arg(long)]
    tol_spectral: Option<String>,
    #[arg(long)]
    tol_kernel: Option<String>,
    #[arg(long)]
    tol_convolution: Option<String>,
    #[arg(long)]
    tol_energy: Option<String>,
    #[arg(long)]
    tol_volume: Option<String>,
    #[arg(long)]
    tol_laplacian: Option<String>,
    #[arg(long)]
    tol_counterexample: Option<String>,
    #[arg(long)]
    tol_el: Option<String>,
    #[arg(long)]
    tol_shift: Option<String>,
    #[arg(long)]
    tol_pizzetti: Option<String>,
}

impl Cli {
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("order", &self.order),
            ("dim", &self.dim),
            ("z0", &self.z0),
            ("a", &self.a),
            ("lambda", &self.lambda),
            ("c", &self.c),
            ("family", &self.family),
            ("field", &self.field),
            ("kmax", &self.kmax),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("res-sphere", &self.res_sphere),
            ("res-radial", &self.res_radial),
            ("fd-h", &self.fd_h),
            ("tol-identity", &self.tol_identity),
            ("tol-residual", &self.tol_residual),
            ("tol-consistency", &self.tol_consistency),
            ("tol-deficit", &self.tol_deficit),
            ("tol-scan", &self.tol_scan),
            ("tol-spectral", &self.tol_spectral),
            ("tol-kernel", &self.tol_kernel),
            ("tol-convolution", &self.tol_convolution),
            ("tol-energy", &self.tol_energy),
            ("tol-volume", &self.tol_volume),
            ("tol-laplacian", &self.tol_laplacian),
            ("tol-counterexample", &self.tol_counterexample),
            ("tol-el", &self.tol_el),
            ("tol-shift", &self.tol_shift),
            ("tol-pizzetti", &self.tol_pizzetti),
        ]
    }

    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut ov = Overrides::new();
        if let Some(path) = &self.config {
            ov.load_file(path)?;
        }
        for (key, value) in self.flags() {
            if let Some(v) = value {
                ov.set(key, v)?;
            }
        }
        RunConfig::resolve(self.campaign, &ov)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let config = match cli.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("sobtrace: {e}");
            return ExitCode::from(2);
        }
    };
    let report = execute(config, cli.timing);
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("sobtrace: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("sobtrace: failed checks: {}", report.failures().join(", "));
        ExitCode::from(1)
    }
}
