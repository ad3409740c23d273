use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree error: {0}")]
    Degree(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("not a G2 form: {0}")]
    NotG2Form(String),

    #[error("structure is not integrable (W2 residual {w2_residual:.3e})")]
    NotIntegrable { w2_residual: f64 },

    #[error("convention mismatch: {0}")]
    Convention(String),

    #[error("identity violated: {name} (residual {residual:.3e})")]
    IdentityViolation { name: String, residual: f64 },

    #[error("jet order exhausted: need order {needed}, have {available}")]
    JetOrder { needed: u8, available: u8 },

    #[error("point {0:?} lies outside the chart")]
    Domain([f64; 7]),

    #[error("frame error: {0}")]
    Frame(String),

    #[error("immersion error: {0}")]
    Immersion(String),

    #[error("killing equations violated: {0}")]
    KillingViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}
