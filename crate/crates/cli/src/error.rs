use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("geometry failure: {0}")]
    Geometry(String),
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("checks failed: {0}")]
    ChecksFailed(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Geometry(_) => 3,
            CliError::NotConverged(_) => 4,
            CliError::Numerical(_) | CliError::Io(_) => 5,
            CliError::ChecksFailed(_) => 1,
        }
    }
}

impl From<fracmusielak::Error> for CliError {
    fn from(e: fracmusielak::Error) -> Self {
        use fracmusielak::Error as E;
        match e {
            E::Geometry(m) => CliError::Geometry(m),
            E::Numerical(m) => CliError::Numerical(m),
            E::Domain(_) | E::InvariantViolation(_) | E::Precondition(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
