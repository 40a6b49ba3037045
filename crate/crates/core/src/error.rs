use thiserror::Error as ThisError;

use crate::hodge::TwistObstruction;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("characteristic two is not supported")]
    CharacteristicTwo,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("linearly dependent input: {0}")]
    LinearlyDependent(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("twist equation has no solution in degrees ({}, {})", .0.degree, .0.partner_degree)]
    Obstruction(Box<TwistObstruction>),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Obstruction(_) => 2,
            Error::Precondition(_) | Error::Verification(_) | Error::LinearlyDependent(_) => 1,
            Error::CharacteristicTwo
            | Error::InvalidField(_)
            | Error::DivisionByZero
            | Error::Malformed(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::CharacteristicTwo => "characteristic-two",
            Error::InvalidField(_) => "invalid-field",
            Error::DivisionByZero => "division-by-zero",
            Error::LinearlyDependent(_) => "linearly-dependent",
            Error::Malformed(_) => "malformed-input",
            Error::Precondition(_) => "precondition",
            Error::Verification(_) => "verification",
            Error::Obstruction(_) => "obstruction",
        }
    }
}
