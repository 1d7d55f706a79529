use thiserror::Error;

/// Error raised by any operation of the toolkit.
///
/// Every variant carries the originating module and operation so that the
/// command line front end can report where a fault came from.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DmpError {
    #[error("{module}::{operation}: invalid input: {message}")]
    Validation {
        module: &'static str,
        operation: &'static str,
        message: String,
    },
    #[error("{module}::{operation}: instance too large: {message}")]
    Infeasible {
        module: &'static str,
        operation: &'static str,
        message: String,
    },
    #[error("{module}::{operation}: undecided within configured bounds: {message}")]
    Undecided {
        module: &'static str,
        operation: &'static str,
        message: String,
    },
    #[error("{module}::{operation}: internal contract violated: {message}")]
    Contract {
        module: &'static str,
        operation: &'static str,
        message: String,
    },
}

impl DmpError {
    pub fn validation(module: &'static str, operation: &'static str, message: impl Into<String>) -> Self {
        DmpError::Validation { module, operation, message: message.into() }
    }

    pub fn infeasible(module: &'static str, operation: &'static str, message: impl Into<String>) -> Self {
        DmpError::Infeasible { module, operation, message: message.into() }
    }

    pub fn undecided(module: &'static str, operation: &'static str, message: impl Into<String>) -> Self {
        DmpError::Undecided { module, operation, message: message.into() }
    }

    pub fn contract(module: &'static str, operation: &'static str, message: impl Into<String>) -> Self {
        DmpError::Contract { module, operation, message: message.into() }
    }

    /// Short machine-readable kind name.
    pub fn kind(&self) -> &'static str {
        match self {
            DmpError::Validation { .. } => "validation",
            DmpError::Infeasible { .. } => "infeasible",
            DmpError::Undecided { .. } => "undecided",
            DmpError::Contract { .. } => "contract",
        }
    }

    pub fn module(&self) -> &'static str {
        match self {
            DmpError::Validation { module, .. }
            | DmpError::Infeasible { module, .. }
            | DmpError::Undecided { module, .. }
            | DmpError::Contract { module, .. } => module,
        }
    }

    pub fn operation(&self) -> &'static str {
        match self {
            DmpError::Validation { operation, .. }
            | DmpError::Infeasible { operation, .. }
            | DmpError::Undecided { operation, .. }
            | DmpError::Contract { operation, .. } => operation,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            DmpError::Validation { message, .. }
            | DmpError::Infeasible { message, .. }
            | DmpError::Undecided { message, .. }
            | DmpError::Contract { message, .. } => message,
        }
    }
}

pub type Result<T> = std::result::Result<T, DmpError>;
