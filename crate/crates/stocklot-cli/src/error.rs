//! Error-to-exit-code mapping.
//!
//! 1 — input errors (unreadable/malformed files, bad flags or config);
//! 2 — missing data (unknown item, absent prices or cost parameters);
//! 3 — internal invariant violations.

use stocklot::abc::AbcError;
use stocklot::demand::DemandError;
use stocklot::ledger::LedgerError;
use stocklot::policy::PolicyError;

#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            exit_code: 1,
            message: message.into(),
        }
    }

    pub fn missing_data(message: impl Into<String>) -> Self {
        CliError {
            exit_code: 2,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            exit_code: 3,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<LedgerError> for CliError {
    fn from(e: LedgerError) -> Self {
        match e {
            LedgerError::ItemNotFound { .. } => CliError::missing_data(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<AbcError> for CliError {
    fn from(e: AbcError) -> Self {
        match e {
            AbcError::EmptyRanking => CliError::missing_data(e.to_string()),
            AbcError::InvalidItem { .. } => CliError::input(e.to_string()),
            AbcError::ContractViolation(_) => CliError::internal(e.to_string()),
        }
    }
}

impl From<DemandError> for CliError {
    fn from(e: DemandError) -> Self {
        match e {
            DemandError::NoMovements { .. } => CliError::missing_data(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<PolicyError> for CliError {
    fn from(e: PolicyError) -> Self {
        match e {
            PolicyError::MissingShortageCost | PolicyError::InsufficientData(_) => {
                CliError::missing_data(e.to_string())
            }
            PolicyError::Domain(_) => CliError::input(e.to_string()),
        }
    }
}
