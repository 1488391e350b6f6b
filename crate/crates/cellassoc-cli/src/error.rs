//! CLI error taxonomy, mapped one-to-one onto process exit codes:
//! 0 success, 1 validation failure, 2 numerical failure, 3 bad arguments.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Malformed command line: unknown names, unparseable parameters.
    BadArgs(String),
    /// A well-formed request that fails its preconditions: invalid
    /// experiment file, impossible parameter values, I/O problems.
    Validation(String),
    /// A quadrature that could not reach its tolerance.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::BadArgs(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::BadArgs(m) | CliError::Validation(m) | CliError::Numerical(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<cellassoc::Error> for CliError {
    fn from(e: cellassoc::Error) -> Self {
        match e {
            cellassoc::Error::Quadrature { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("I/O error: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::CliError;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::Validation("v".into()).exit_code(), 1);
        assert_eq!(CliError::Numerical("n".into()).exit_code(), 2);
        assert_eq!(CliError::BadArgs("b".into()).exit_code(), 3);
    }

    #[test]
    fn quadrature_failures_map_to_the_numerical_code() {
        let quad = cellassoc::Error::Quadrature {
            context: "test",
            estimate: 0.5,
            error_bound: 1e-3,
        };
        assert_eq!(CliError::from(quad).exit_code(), 2);
        let invalid = cellassoc::Error::InvalidParameter {
            name: "alpha",
            message: "needs to exceed 2".into(),
        };
        assert_eq!(CliError::from(invalid).exit_code(), 1);
    }
}
