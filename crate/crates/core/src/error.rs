use thiserror::Error;

/// Errors raised by mesh construction, assembly, the solvers and the I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("meshes are not nested: {0}")]
    NotNested(String),

    #[error("field does not match mesh: {0}")]
    MeshMismatch(String),

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("damage value {0} outside [0, 1]")]
    DamageOutOfRange(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
