use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{0}")]
    Config(String),

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    /// The drift matrix is not Hurwitz. Carries the three Routh-Hurwitz margins
    /// and the spectral abscissa at the failing point.
    #[error(
        "unstable parameters: margins ({:.6e}, {:.6e}, {:.6e}), spectral abscissa {:.6e}",
        margins[0], margins[1], margins[2], spectral_abscissa
    )]
    Unstable {
        margins: [f64; 3],
        spectral_abscissa: f64,
    },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("integration diverged at t = {t}: |V| reached {magnitude:.3e}")]
    Divergence { t: f64, magnitude: f64 },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("unphysical input: {0}")]
    Unphysical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag used in CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::Config(_) => "config",
            Error::UnknownKey(_) => "unknown-key",
            Error::Unstable { .. } => "unstable",
            Error::Singular(_) => "singular",
            Error::Divergence { .. } => "divergence",
            Error::NonConvergence { .. } => "non-convergence",
            Error::Unphysical(_) => "unphysical",
            Error::Io(_) => "io",
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unstable { .. } => 2,
            Error::InvalidParameter { .. }
            | Error::Config(_)
            | Error::UnknownKey(_)
            | Error::Io(_) => 3,
            Error::Singular(_)
            | Error::Divergence { .. }
            | Error::NonConvergence { .. }
            | Error::Unphysical(_) => 4,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(std::io::Error::other(e.to_string()))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(std::io::Error::other(e.to_string()))
    }
}
