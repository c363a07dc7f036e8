use thiserror::Error;

/// Failures surfaced by the numerical kernels and the two physical models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not reach tolerance within {subdivisions} subdivisions (best estimate {estimate:e})")]
    NonConvergence { estimate: f64, subdivisions: usize },

    #[error("integration diverged at t = {time:e}")]
    Divergence { time: f64 },

    #[error("degenerate denominator gamma^2 - n^2 = 0 at n = {n}, gamma = {gamma}")]
    DegenerateDenominator { n: usize, gamma: f64 },

    #[error("{steps} steps resolve the fastest period with only {points_per_period:.1} points (need 20)")]
    Underresolved { steps: usize, points_per_period: f64 },

    #[error("no qualifying drive ratio in scan range (maximum return probability {max:e})")]
    NotFound { max: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
