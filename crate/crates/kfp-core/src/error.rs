use thiserror::Error;

/// Errors produced by the simulation primitives.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {message} (got {value})")]
    Parameter {
        name: &'static str,
        message: &'static str,
        value: f64,
    },

    /// Conditioning A | B is undefined at t = 0 where Var(B) = 0.
    #[error("degenerate conditioning: Var(B) vanishes at t = {t}")]
    DegenerateConditioning { t: f64 },

    /// The wrapped conditional density has no usable uniform component:
    /// the spreading estimate is vacuous at this time horizon.
    #[error(
        "spreading estimate vacuous: sigma2 = {sigma2} gives beta <= 0 on a torus of scale {l}; \
         choose a larger time horizon"
    )]
    SpreadingUnavailable { sigma2: f64, l: f64 },

    #[error("size mismatch: left measure has {left} points, right has {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("assignment problem of size {n} exceeds the configured cap {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// The separation-lower-bound construction needs the two intervals to
    /// stay disjoint on the torus; at this (dist, t) they overlap.
    #[error("interval overlap: dist = {dist}, t = {t} makes the transported intervals meet")]
    IntervalOverlap { dist: f64, t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parameter(name: &'static str, message: &'static str, value: f64) -> Self {
        Error::Parameter {
            name,
            message,
            value,
        }
    }
}
