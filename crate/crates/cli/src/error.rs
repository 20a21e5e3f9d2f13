use elastica_mkdv::{Error, ErrorClass};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("tolerance breach: {0}")]
    Breach(String),
    #[error("symbolic check failed: {0}")]
    Symbolic(String),
}

impl CliError {
    /// 1 usage or parse, 2 numerical instability, 3 tolerance breach,
    /// 4 symbolic failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e.class() {
                ErrorClass::Usage => 1,
                ErrorClass::Numerical => 2,
                ErrorClass::Tolerance => 3,
                ErrorClass::Symbolic => 4,
            },
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Breach(_) => 3,
            CliError::Symbolic(_) => 4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_follow_error_classes() {
        let inst = CliError::from(Error::Instability {
            time: 0.1,
            reason: "x".into(),
        });
        assert_eq!(inst.exit_code(), 2);
        assert_eq!(CliError::from(Error::Parse("x".into())).exit_code(), 1);
        assert_eq!(CliError::from(Error::ConstantCollapse { value: 1.0 }).exit_code(), 3);
        assert_eq!(CliError::from(Error::NotExact("x".into())).exit_code(), 4);
        assert_eq!(CliError::Breach("x".into()).exit_code(), 3);
    }
}
