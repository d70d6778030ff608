use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error {error:e} after {evals} evaluations")]
    Quadrature { estimate: f64, error: f64, evals: usize },

    #[error("point (t = {t}, r = {r}) lies outside the forward light cone")]
    OutsideLightCone { t: f64, r: f64 },

    #[error("derivative check failed for {what}: analytic {analytic:e}, finite difference {numeric:e}")]
    Derivative { what: String, analytic: f64, numeric: f64 },

    #[error("finite-difference stencil invalid: {0}")]
    Stencil(String),

    #[error("solution blew up at t = {t}")]
    Blowup { t: f64 },

    #[error("boundary contamination at t = {t}: outer-zone fraction {fraction:e} exceeds {tolerance:e}")]
    BoundaryContamination { t: f64, fraction: f64, tolerance: f64 },

    #[error("smallness violated: {measured:e} exceeds {threshold:e}")]
    Smallness { measured: f64, threshold: f64 },

    #[error("fixed-point iteration did not contract (ratios {ratios:?}); data size proxy {eta:e}")]
    NoContraction { ratios: Vec<f64>, eta: f64 },

    #[error("time sampling too coarse: omega_max * dtau = {0}")]
    Resolution(f64),

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn within(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
