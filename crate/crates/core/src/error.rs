use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `sin γ = 0` while `β̇` does not vanish, so the coupling formula has no finite limit.
    #[error("coupling singularity at γ = {gamma:e} with β̇ = {beta_dot:e}")]
    Singularity { gamma: f64, beta_dot: f64 },

    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    Quadrature {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("compile error: {0}")]
    Compile(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    /// The density matrix acquired an eigenvalue below the positivity tolerance.
    #[error("positivity violated at t = {t} ns: minimum eigenvalue {min_eigenvalue:e}")]
    Positivity { t: f64, min_eigenvalue: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("unknown platform `{0}`")]
    UnknownPlatform(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Usage-type failures (bad arguments or inputs) as opposed to numerical failures.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::UnknownPlatform(_) | Error::Parse { .. } | Error::InvalidSchedule(_)
        )
    }
}
