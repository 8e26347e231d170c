use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("scaling law overflow: result saturated at {saturated:e}")]
    Overflow { saturated: f64 },
    #[error("asymptotic phase integral requested with zero frequency")]
    AsymptoticInvalid,
    #[error("quadrature did not converge: estimated relative error {rel_err:e} after {evals} evaluations")]
    Quadrature { rel_err: f64, evals: usize },
    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("too many integration steps ({steps}) at t = {t:e}")]
    MaxSteps { t: f64, steps: usize },
    #[error("norm drift {drift:e} exceeds limit {limit:e}")]
    NormDrift { drift: f64, limit: f64 },
    #[error("ladder boundary population {pop:e} exceeds {limit:e}; widen the ladder")]
    Boundary { pop: f64, limit: f64 },
    #[error("non-finite field value at t = {0}")]
    NonFinite(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
