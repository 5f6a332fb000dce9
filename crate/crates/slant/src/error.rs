use thiserror::Error;

use crate::dsl::DslError;

#[derive(Debug, Clone, Error)]
pub enum GeomError {
    #[error("invalid complex structure: {0}")]
    InvalidStructure(String),
    #[error("2-vector cannot be inverted to a complex structure: {0}")]
    InvalidZeta(String),
    #[error("invalid plane: {0}")]
    InvalidPlane(String),
    #[error("point ({u}, {v}) lies outside the chart domain")]
    Domain { u: f64, v: f64 },
    #[error("not an immersion at ({u}, {v}): gram determinant {gram:e}")]
    NotImmersion { u: f64, v: f64, gram: f64 },
    #[error("ambient dimension {got} unsupported here (expected {expected})")]
    AmbientDim { got: usize, expected: usize },
    #[error("slant angle {theta} is degenerate: the point is {kind}")]
    DegenerateAngle { theta: f64, kind: &'static str },
    #[error("unsupported size: {0}")]
    Unsupported(String),
    #[error("open loop: endpoint mismatch {0:e}")]
    OpenLoop(f64),
    #[error("insufficient samples: need at least {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },
    #[error("quaternion is not unit: norm {0}")]
    NonUnit(f64),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("unknown identifier: {0}")]
    Unknown(String),
    #[error(transparent)]
    Dsl(#[from] DslError),
}

impl GeomError {
    /// Configuration problems (bad ids, parameters, expressions) as opposed to
    /// numerical failures discovered while evaluating a valid input.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            GeomError::Params(_)
                | GeomError::Unknown(_)
                | GeomError::Dsl(_)
                | GeomError::OpenLoop(_)
                | GeomError::AmbientDim { .. }
                | GeomError::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
