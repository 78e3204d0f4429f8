use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("data error: {0}")]
    Data(String),

    /// A persisted landscape failed validation; `field` names the offending entry.
    #[error("malformed landscape file: {field}: {reason}")]
    Format { field: String, reason: String },

    #[error("numerical integration did not converge: {0}")]
    Quadrature(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn format(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Format {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
