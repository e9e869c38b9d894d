use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("spec {0} is already a Galilean limit")]
    AlreadyGalileanLimit(String),

    #[error("observable evaluated to a non-finite value at t = {t}")]
    NonFiniteObservable { t: f64 },

    #[error("integration produced a non-finite state at t = {t}")]
    BlowUp { t: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::AlreadyGalileanLimit(_) | Error::Json(_) => 2,
            Error::NonFiniteObservable { .. } | Error::BlowUp { .. } => 3,
            Error::Io(_) | Error::Csv(_) => 2,
        }
    }
}
