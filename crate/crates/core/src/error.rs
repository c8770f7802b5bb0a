use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its documented range.
    #[error("invalid {name}: {constraint} (got {value})")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: String,
    },

    /// The step-function probabilities are not defined when the phase
    /// difference is an integral multiple of pi.
    #[error("outcome probabilities undefined at integral multiples of pi (phase difference {0})")]
    UndefinedAngle(f64),

    #[error("empty denominator: {0}")]
    EmptyDenominator(&'static str),

    #[error("correlation {0} outside [-1, 1]")]
    CorrelationDomain(f64),

    #[error("degenerate curve: max + min = 0")]
    DegenerateCurve,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("discriminate called without a discriminator threshold")]
    MissingThreshold,

    #[error("config error: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, constraint: &'static str, value: impl ToString) -> Self {
        Error::InvalidParameter {
            name,
            constraint,
            value: value.to_string(),
        }
    }

    /// Process exit code: 2 for configuration and usage problems, 3 for
    /// everything that fails at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } | Error::Config(_) | Error::Usage(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
