use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point outside `[0,1]` was handed to an evaluator.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument error: {0}")]
    Argument(String),
    /// Malformed external input (JSON, CSV, CLI flags).
    #[error("input error: {0}")]
    Input(String),
    #[error("construction error: {0}")]
    Construction(String),
    /// A certified search or inclusion failed; `claim` names what was being certified.
    #[error("certification failed for {claim}: {detail}")]
    Certification { claim: String, detail: String },
    #[error("rule violation: {0}")]
    Rule(String),
    /// A computation exceeded a hard resource cap or a numeric floor.
    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

impl Error {
    /// Stable lowercase tag for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Argument(_) => "argument",
            Error::Input(_) => "input",
            Error::Construction(_) => "construction",
            Error::Certification { .. } => "certification",
            Error::Rule(_) => "rule",
            Error::Resource(_) => "resource",
        }
    }
}
