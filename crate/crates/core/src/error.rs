use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("emitter {index} sits at site {site}, outside the lattice of {n} sites")]
    SiteOutOfRange { index: usize, site: usize, n: usize },

    /// Energy lies inside a relative-motion band so the Green function has a pole.
    #[error("energy {energy} lies inside the relative band of half-width {edge} (branch {branch})")]
    InsideBand { energy: f64, edge: f64, branch: u8 },

    #[error("no doublon on the {branch} branch at K = {k}")]
    UnresolvedBranch { k: f64, branch: &'static str },

    /// Emitter frequency is resonant with the single-photon band |omega| <= 2J.
    #[error("emitter frequency {omega} is resonant with the single-photon band [-{edge}, {edge}]")]
    Resonance { omega: f64, edge: f64 },

    /// Pair energy falls inside the lower doublon band, so Delta_K changes sign.
    #[error("pair energy {pair_energy} lies inside the lower doublon band (top {band_top})")]
    PairInBand { pair_energy: f64, band_top: f64 },

    #[error("regime violation: {0}")]
    Regime(String),

    #[error("norm drift {drift:e} exceeds tolerance {tol:e} at t = {time}")]
    NormDrift { drift: f64, tol: f64, time: f64 },

    #[error("iterative eigensolver did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("insufficient signal: {0}")]
    InsufficientSignal(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
