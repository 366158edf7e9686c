use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// exp argument of the weight exceeded the double-precision threshold
    #[error("weight saturated at t = {t} (exponent {exponent:.3e} > 700)")]
    WeightSaturated { t: f64, exponent: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("point outside grid: {0}")]
    OutOfDomain(String),

    #[error("kernel error at x1 = {x1:?}, x2 = {x2:?}: {msg}")]
    Kernel {
        x1: [f64; 4],
        x2: [f64; 4],
        msg: String,
    },

    #[error("kernel not C2-resolved: {0}")]
    KernelUnresolved(String),

    #[error("Neumann series diverging: {0}")]
    Divergence(String),

    #[error("inner sweep did not converge on shell {shell} (change {change:.3e})")]
    SweepNonConvergence { shell: usize, change: f64 },

    #[error("condition violated: {0}")]
    Condition(String),

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
