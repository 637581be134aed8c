use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("run failed: {0}")]
    Runtime(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io { .. } => 3,
            CliError::Assumption(_) => 4,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Verification(String::new()).exit_code(), 1);
        assert_eq!(CliError::Config(String::new()).exit_code(), 2);
        assert_eq!(CliError::Runtime(String::new()).exit_code(), 3);
        assert_eq!(CliError::Assumption(String::new()).exit_code(), 4);
    }
}
