use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tabulated weight queried at t = {t}, beyond the table end {end}")]
    Extrapolation { t: f64, end: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("elements are defined on different grids")]
    GridMismatch,

    #[error("tail error: {0}")]
    Tail(String),

    #[error("support overflow: supports sum to {needed}, grid ends at {t_max}")]
    SupportOverflow { needed: f64, t_max: f64 },

    #[error("window [{t}, {end}] exceeds the grid end {t_max}")]
    WindowOverflow { t: f64, end: f64, t_max: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("unknown catalog id `{0}`")]
    UnknownId(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
