use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("blow-up at t = {t}: sup-norm {sup_norm:e} exceeds guard {guard:e}")]
    BlowUp { t: f64, sup_norm: f64, guard: f64 },

    #[error("boundary leak during {stage}: {fraction:e} of the mass sits in the outer layer (tolerance {tolerance:e})")]
    BoundaryLeak {
        stage: &'static str,
        fraction: f64,
        tolerance: f64,
    },

    #[error("mass drift {drift:e} exceeds tolerance {tolerance:e} in run '{run}'")]
    MassDrift {
        run: String,
        drift: f64,
        tolerance: f64,
    },

    #[error("t = {t} lies inside the excluded focus window |t - 1| <= {delta}")]
    TooCloseToFocus { t: f64, delta: f64 },

    #[error("evaluation at the caustic t = {0}")]
    AtCaustic(f64),

    #[error("cusp geometry is one-dimensional, got n = {0}")]
    UnsupportedDimension(u32),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("fine grid has {fine} points, need at least 4 x {coarse}")]
    InsufficientResolution { fine: usize, coarse: usize },

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "invalid_grid",
            Error::InvalidParams(_) => "invalid_params",
            Error::GridMismatch => "grid_mismatch",
            Error::BlowUp { .. } => "blow_up",
            Error::BoundaryLeak { .. } => "boundary_leak",
            Error::MassDrift { .. } => "mass_drift",
            Error::TooCloseToFocus { .. } => "too_close_to_focus",
            Error::AtCaustic(_) => "at_caustic",
            Error::UnsupportedDimension(_) => "unsupported_dimension",
            Error::HypothesisViolated(_) => "hypothesis_violated",
            Error::InsufficientResolution { .. } => "insufficient_resolution",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
