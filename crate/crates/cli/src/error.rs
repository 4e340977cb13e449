use gauss_periods::cm::CmError;
use gauss_periods::laurent::LaurentError;
use gauss_periods::modring::ModringError;
use gauss_periods::periods::PeriodsError;
use gauss_periods::render::RenderError;
use gauss_periods::weyl::WeylError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ModringError> for CliError {
    fn from(e: ModringError) -> Self {
        match e {
            ModringError::NotFound { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<PeriodsError> for CliError {
    fn from(e: PeriodsError) -> Self {
        match e {
            PeriodsError::Modring(inner) => inner.into(),
            PeriodsError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<WeylError> for CliError {
    fn from(e: WeylError) -> Self {
        match e {
            WeylError::Modring(inner) => inner.into(),
            WeylError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<CmError> for CliError {
    fn from(e: CmError) -> Self {
        match e {
            CmError::Modring(inner) => inner.into(),
            CmError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            CmError::PoleAtLattice(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<LaurentError> for CliError {
    fn from(e: LaurentError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Io(_) => CliError::Io(e.to_string()),
            RenderError::Image(_) => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
