use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("position out of range: {0}")]
    PositionOutOfRange(String),
    #[error("unmapped symbol `{0}`")]
    Unmapped(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid grammar: {0}")]
    Grammar(String),
    #[error("unsupported production `{0}`")]
    Unsupported(String),
    #[error("empty string unsupported")]
    EmptyString,
    #[error("not in quadratic Greibach normal form: {0}")]
    NotGnf(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid relabeling: {0}")]
    Relabeling(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
