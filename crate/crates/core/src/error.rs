use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelSetError {
    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("lattice basis is singular or nearly singular (|det| = {det:e})")]
    SingularLattice { det: f64 },

    #[error("invalid smoothing width: {0}")]
    InvalidSmoothing(String),

    #[error("no tail certificate available: {0}")]
    NoTailBound(String),

    #[error("duplicate node at {0}")]
    DuplicateNode(f64),

    #[error("point set is not uniformly discrete (min gap {0:e})")]
    NotUniformlyDiscrete(f64),

    #[error("quadrature setup failed: {0}")]
    QuadratureError(String),

    #[error("problem size exceeds guard: {0}")]
    TooLarge(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, ModelSetError>;
