use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by all modules.  The CLI maps these onto exit
/// codes: validation-type errors -> 2, numeric-audit failures -> 3,
/// budget overruns -> 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation: {0}")]
    Validation(String),

    #[error("pole or removable-singularity hit: {0}")]
    Pole(String),

    #[error("requested precision unreachable: {0}")]
    PrecisionUnreachable(String),

    #[error("exact evaluators disagree: {0}")]
    MethodDisagreement(String),

    #[error("window outside the approximate-functional-equation range: {0}")]
    WindowViolation(String),

    #[error("numeric audit failed: {0}")]
    NumericAudit(String),

    #[error("resource budget exceeded: {0}")]
    ResourceBudget(String),

    #[error("zero enumeration did not reconcile: {0}")]
    EnumerationIncomplete(String),

    #[error("boundary walk did not converge: {0}")]
    NonConvergence(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Pole(_) | Error::WindowViolation(_) => 2,
            Error::PrecisionUnreachable(_)
            | Error::MethodDisagreement(_)
            | Error::NumericAudit(_)
            | Error::EnumerationIncomplete(_)
            | Error::NonConvergence(_) => 3,
            Error::ResourceBudget(_) => 4,
            Error::Io(_) => 1,
        }
    }
}
