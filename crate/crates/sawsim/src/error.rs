use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the physics and fitting layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter validation failed: {0}")]
    InvalidParams(String),

    #[error("frequency {requested:.6e} Hz outside tunable band [{lo:.6e}, {hi:.6e}] Hz")]
    OutOfRange { requested: f64, lo: f64, hi: f64 },

    #[error("dispersive regime violated for mode {mode}: |Δ|/g = {ratio:.2} < 3")]
    DispersiveViolation { mode: usize, ratio: f64 },

    #[error("pole in dispersive formula: {0}")]
    Pole(String),

    #[error("Fock cutoff too small: last-level population {population:.3e} exceeds 1e-6")]
    CutoffTooSmall { population: f64 },

    #[error("matrix contract violation: {0}")]
    Contract(String),

    #[error("rank-deficient normal equations in least-squares solve")]
    RankDeficient,

    #[error("fit setup error: {0}")]
    FitSetup(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
