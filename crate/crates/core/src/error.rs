use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// `ξ = -e_{n+1}` has no image in the half-space.
    PolePoint,
    /// A field was evaluated at a point of its singular set.
    Singular(String),
    /// A stencil or sphere left the region where the field may be evaluated.
    Clearance(String),
    /// The chart of a field does not match what the operation expects.
    ChartMismatch(String),
    /// Order/dimension combination with no inequality attached to it.
    Unsupported { order: u32, n: usize },
    /// A boundary condition required by the operation does not hold.
    Precondition(String),
    /// Coarse and fine evaluations of an integral disagree.
    Convergence {
        what: String,
        coarse: f64,
        fine: f64,
    },
    /// Boundary data passed to the zonal projector is not zonal.
    NonZonal { spread: f64 },
    /// Least-squares design matrix is rank deficient.
    RankDeficient,
    /// Spectral tail bound exceeds the requested tolerance.
    Truncation { tail: f64, tolerance: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::PolePoint => write!(f, "pole point -e_(n+1) maps to infinity"),
            Error::Singular(msg) => write!(f, "singular point: {msg}"),
            Error::Clearance(msg) => write!(f, "stencil clearance: {msg}"),
            Error::ChartMismatch(msg) => write!(f, "chart mismatch: {msg}"),
            Error::Unsupported { order, n } => {
                write!(f, "no order-{order} inequality in boundary dimension {n}")
            }
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::Convergence { what, coarse, fine } => write!(
                f,
                "{what}: coarse {coarse:e} and fine {fine:e} resolutions disagree"
            ),
            Error::NonZonal { spread } => {
                write!(f, "boundary data is not zonal (latitude spread {spread:e})")
            }
            Error::RankDeficient => write!(f, "least-squares system is rank deficient"),
            Error::Truncation { tail, tolerance } => write!(
                f,
                "spectral tail bound {tail:e} exceeds tolerance {tolerance:e}"
            ),
        }
    }
}

impl core::error::Error for Error {}
