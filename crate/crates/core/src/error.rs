use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input coordinate {index} = {value} is outside [0, 1] or not finite")]
    InputDomain { index: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{corruptible} corruptible coordinates exceed the enumeration limit of {limit}")]
    EnumerationLimit { corruptible: usize, limit: usize },

    #[error("step schedule invalid at iteration {iteration}: {reason}")]
    ScheduleValidity { iteration: usize, reason: String },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("infeasible sub-network split: {0}")]
    Infeasible(String),

    #[error("invalid plan: {0}")]
    Plan(String),

    #[error("dataset is empty")]
    EmptyDataset,
}

impl Error {
    /// Short machine-readable category.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InputDomain { .. } => "input-domain",
            Error::Dimension(_) => "dimension",
            Error::EnumerationLimit { .. } => "enumeration-limit",
            Error::ScheduleValidity { .. } => "schedule-validity",
            Error::Domain(_) => "domain",
            Error::Infeasible(_) => "infeasible",
            Error::Plan(_) => "plan",
            Error::EmptyDataset => "empty-dataset",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
