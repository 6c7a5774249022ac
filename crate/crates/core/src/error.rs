use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("state outside the admissible region h > 0, sxx > 0, szz > 0: {0}")]
    InvalidState(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dP/dh = {value:e} is not positive; parameters lie outside the hyperbolic regime")]
    NonHyperbolic { value: f64 },

    #[error("depth {h:e} is below the vacuum floor {floor:e} of the wave curve")]
    VacuumProximity { h: f64, floor: f64 },

    #[error("{what} did not converge after {iterations} iterations ({detail})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        detail: String,
    },

    #[error("vacuum in the G=0 limit: u_r - u_l = {gap:e} >= 2 sqrt(g h_l) + 2 sqrt(g h_r) = {threshold:e}")]
    SaintVenantVacuum { gap: f64, threshold: f64 },

    #[error("data open a vacuum: no star pressure above the lower bound {pressure_floor:e} closes the wave fan ({detail})")]
    Vacuum { pressure_floor: f64, detail: String },

    #[error("relaxation time is infinite; the source step must be skipped")]
    ElasticLimit,

    #[error("cell {index} left the admissible region at t = {time:e}: {detail}")]
    Stability {
        index: usize,
        time: f64,
        detail: String,
    },
}
