use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{quantity} = {value} is outside its domain: {reason}")]
    Domain {
        quantity: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The synthesized trap frequency becomes imaginary (repulsive potential).
    #[error("omega^2 < 0 first at t = {t}; retry with a longer stroke")]
    InvalidProtocol { t: f64 },

    #[error("infeasible stroke at t = {t}: {reason}")]
    InfeasibleStroke { t: f64, reason: String },

    #[error("protocol inversion failed: {0}")]
    ProtocolInversionFailure(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("population {leakage:.3e} leaked into the top levels of a {dimension}-level truncation; use a larger dimension")]
    Truncation { dimension: usize, leakage: f64 },

    #[error("{0}")]
    Config(String),

    #[error("stroke '{stroke}': {source}")]
    Stroke { stroke: String, source: Box<Error> },

    #[error("no limit cycle after {} cycles (last residual {:.3e})", .history.len(), .history.last().copied().unwrap_or(f64::NAN))]
    NonConvergence { history: Vec<f64> },

    #[error("{0}")]
    Analysis(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            quantity,
            value,
            reason,
        }
    }

    /// Short variant name, used by front ends on standard error.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "DomainError",
            Error::InvalidProtocol { .. } => "InvalidProtocol",
            Error::InfeasibleStroke { .. } => "InfeasibleStroke",
            Error::ProtocolInversionFailure(_) => "ProtocolInversionFailure",
            Error::Integration { .. } => "IntegrationError",
            Error::Unphysical(_) => "UnphysicalState",
            Error::Truncation { .. } => "TruncationError",
            Error::Config(_) => "ConfigError",
            Error::Stroke { source, .. } => source.name(),
            Error::NonConvergence { .. } => "NonConvergence",
            Error::Analysis(_) => "AnalysisError",
            Error::Io(_) => "IoError",
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }

    pub(crate) fn in_stroke(self, stroke: &str) -> Self {
        Error::Stroke {
            stroke: stroke.to_string(),
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
