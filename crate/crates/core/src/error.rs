use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line through ({x:.6}, {y:.6}) is tangent to or misses the disc")]
    TangentLine { x: f64, y: f64 },

    #[error("evaluation point ({x:.6}, {y:.6}) is outside the admissible region: {reason}")]
    PointOutOfDomain { x: f64, y: f64, reason: String },

    #[error("mesh generation failed: {0}")]
    MeshGeneration(String),

    #[error("neighborhood too small for {} triangle(s): {:?}", .triangles.len(), .triangles)]
    NeighborhoodTooSmall { triangles: Vec<usize> },

    #[error("rank-deficient least-squares neighborhood at triangle {triangle}")]
    RankDeficient { triangle: usize },

    #[error("parity mismatch: {0}")]
    ParityMismatch(String),

    #[error("singular factorization of the chord system")]
    SingularSystem,

    #[error("residual {residual:.3e} exceeds tolerance for mode {mode}")]
    ResidualBreach { mode: i32, residual: f64 },

    #[error("zero denominator in relative error")]
    ZeroDenominator,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn in_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// True for failures of a numerical stage (as opposed to bad input data).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Stage { source, .. } => source.is_numerical(),
            Error::SingularSystem
            | Error::ResidualBreach { .. }
            | Error::RankDeficient { .. }
            | Error::NeighborhoodTooSmall { .. }
            | Error::MeshGeneration(_)
            | Error::ZeroDenominator
            | Error::PointOutOfDomain { .. } => true,
            _ => false,
        }
    }
}
