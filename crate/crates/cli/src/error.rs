use stefan_lab::Error;
use thiserror::Error;

/// Failures that stop a command before its checks are judged.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config, bad usage or an unmet precondition; exit code 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// The solver or another computation failed; exit code 1.
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) | CliError::Output(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::Precondition(_) => {
                CliError::Config(e.to_string())
            }
            Error::Io(m) => CliError::Output(m),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        assert_eq!(
            CliError::from(Error::invalid("q", "too small")).exit_code(),
            2
        );
        let diverged = Error::NewtonDiverged {
            step: 3,
            time: 0.1,
            residual: 1.0,
        };
        let e = CliError::from(diverged);
        assert_eq!(e.exit_code(), 1);
        assert!(e.to_string().contains("step 3"));
    }
}
