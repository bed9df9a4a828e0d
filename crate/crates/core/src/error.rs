use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("grid too narrow: boundary density {density:e} exceeds {threshold:e}")]
    GridTooNarrow { density: f64, threshold: f64 },

    #[error("norm drift {drift:e} at step {step}")]
    Instability { step: usize, drift: f64 },

    #[error("{space}-space boundary density {density:e} at step {step}")]
    BoundaryLeak {
        step: usize,
        space: &'static str,
        density: f64,
    },

    #[error("reflected and transmitted parts overlap ({overlap:e}); run longer")]
    NotSeparated { overlap: f64 },

    #[error("Fock cutoff {cutoff} overflowed at step {step}: top-level occupation {tail:e}")]
    CutoffOverflow {
        step: usize,
        cutoff: usize,
        tail: f64,
        /// Occupation summed over consecutive blocks of Fock levels, lowest first.
        profile: Vec<f64>,
    },

    #[error("inconsistent scenario: {0}")]
    InconsistentScenario(String),

    #[error("dimension {dim} exceeds the dense cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("Krylov iteration did not converge (residual {residual:e})")]
    KrylovBreakdown { residual: f64 },

    #[error("undersampled fringe scan: {0}")]
    UndersampledScan(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("scenario {name}: {source}")]
    Scenario {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_scenario(self, name: &str) -> Self {
        Error::Scenario {
            name: name.to_owned(),
            source: Box::new(self),
        }
    }
}
