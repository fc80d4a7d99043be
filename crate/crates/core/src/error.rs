use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "hazard is unbounded in the activity; supply an activity cap so that a finite rate bound exists"
    )]
    UnboundedHazard,

    #[error("initial support extends to s = {support:.6} but the grid only admits s <= {limit:.6} (s_max - T)")]
    DomainTruncation { support: f64, limit: f64 },

    #[error("time step {dt:.6e} violates the CFL bound {bound:.6e}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("survival integral diverges: the hazard never fires ({0})")]
    NonFiring(String),

    #[error("t = {t} is at or beyond the blow-up time {t_star:.10}")]
    BeyondBlowUp { t: f64, t_star: f64 },

    #[error("fixed-point solve failed at step {step}: {reason}")]
    FixedPoint { step: usize, reason: String },

    #[error("internal invariant broken at step {step}: {reason}")]
    Internal { step: usize, reason: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
