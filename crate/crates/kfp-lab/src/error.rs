use thiserror::Error;

/// Harness failures, split by CLI exit class: configuration problems exit
/// with code 2, numerical/domain problems with code 3.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerics(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Numerics(_) => 3,
        }
    }
}

impl From<kfp_core::Error> for LabError {
    fn from(e: kfp_core::Error) -> Self {
        LabError::Numerics(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
