use thiserror::Error;

use crate::jets::DomainError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),

    /// Argument outside the open domain of a chart map.
    #[error("{map}: argument {x} outside open domain ({lo}, {hi})")]
    OutOfDomain { map: String, x: f64, lo: f64, hi: f64 },

    /// Point not covered by a chart (typically beyond a horizon).
    #[error("point not covered by chart `{chart}`: {detail}")]
    Coverage { chart: String, detail: String },

    #[error("no root: target {target} outside the range ({lo}, {hi}) of `{map}`")]
    NoRoot { map: String, target: f64, lo: f64, hi: f64 },

    #[error("`{map}` is not monotone near {x}")]
    NotMonotone { map: String, x: f64 },

    #[error("root finding for `{map}` did not converge after {iterations} iterations")]
    NoConvergence { map: String, iterations: usize },

    /// A quantity is singular at the given location (zero denominator, vanishing slope).
    #[error("{what} is singular at {location}")]
    Singular { what: String, location: f64 },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("vacuum state error: {0}")]
    State(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("unknown chart `{0}`")]
    UnknownChart(String),

    #[error("bad parameter {name} = {value}: {reason}")]
    BadParameter { name: String, value: f64, reason: String },

    #[error("no closed form registered for scenario `{scenario}` in chart `{chart}`")]
    OracleUnavailable { scenario: String, chart: String },

    #[error("region violates the singular-ray margin {margin}: {detail}")]
    Margin { margin: f64, detail: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for errors that mean "this point sits on or past a singular ray / horizon".
    pub fn is_singular_point(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::OutOfDomain { .. } | Error::Coverage { .. } | Error::Singular { .. } | Error::NoRoot { .. }
        )
    }
}
