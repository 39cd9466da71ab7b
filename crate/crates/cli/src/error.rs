use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl From<ethf_core::Error> for CliError {
    fn from(e: ethf_core::Error) -> Self {
        use ethf_core::Error as E;
        match e {
            E::NoConvergence { .. } | E::NonFinite(_) => CliError::Numerical(e.to_string()),
            E::InvalidParameter { .. } | E::DimensionMismatch { .. } | E::SectorTooLarge { .. } => {
                CliError::Config(e.to_string())
            }
        }
    }
}
