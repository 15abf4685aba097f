use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("singular resolvent at continued-fraction rung n = {rung}")]
    SingularResolvent { rung: i32 },

    #[error("singular Laplace-domain system at z = {re:e}{im:+e}i; increase z_epsilon or move z off the Liouvillian spectrum")]
    SingularSystem { re: f64, im: f64 },

    #[error("steady state is not unique: two smallest singular values {smallest:e} and {second:e} coincide")]
    DegenerateNullspace { smallest: f64, second: f64 },

    #[error("numerical failure in {0}")]
    Numerical(&'static str),

    #[error("time-domain integration unstable: trace drifted by {drift:e} at t = {time:e} ns")]
    TraceDrift { drift: f64, time: f64 },

    #[error("no polariton splitting: radicand {radicand:e} is negative")]
    NoSplitting { radicand: f64 },

    #[error("phonon occupation diverges at zero detuning")]
    ZeroDetuning,

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("model pole at x = {pole:e} lies inside the data range")]
    PoleInRange { pole: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("at sweep point {variable} = {value}: {source}")]
    AtPoint {
        variable: String,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Configuration and input errors, as opposed to solver failures.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::InvalidParameter { .. }
            | Error::InvalidDimension(_)
            | Error::Config(_)
            | Error::UnknownKey(_) => true,
            Error::AtPoint { source, .. } => source.is_config_error(),
            _ => false,
        }
    }

    pub(crate) fn at_point(self, variable: &str, value: f64) -> Error {
        Error::AtPoint {
            variable: variable.to_string(),
            value,
            source: Box::new(self),
        }
    }
}
