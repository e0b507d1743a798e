use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid play: {0}")]
    InvalidPlay(String),

    #[error("unknown observation `{0}`")]
    UnknownObservation(String),

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("gadget name `{0}` collides with an existing state id")]
    NameCollision(String),

    #[error("capacity exceeded: more than {bound} {what}")]
    Capacity { what: &'static str, bound: usize },

    #[error("size guard: {0}")]
    TooLarge(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}
