use thiserror::Error;

#[derive(Debug, Error)]
pub enum HelixError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids ({0}x{1} vs {2}x{3})")]
    GridMismatch(usize, usize, usize, usize),

    #[error("field is in {found} representation, expected {expected}")]
    Representation {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid norm exponent p = {0}")]
    InvalidExponent(f64),

    #[error("right-hand side must have zero mean (normalized mean {0:.3e})")]
    NonZeroMean(f64),

    #[error("time step {dt:.3e} exceeds the CFL limit {limit:.3e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("solver residual {residual:.3e} above tolerance {tol:.3e}")]
    Solver { residual: f64, tol: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, HelixError>;
