use thiserror::Error;

/// Problems reading one of the JSON documents (PDA, DFA, TM, configs).
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid document: {0}")]
    Invalid(String),
}

impl FormatError {
    pub fn from_json(e: serde_json::Error) -> Self {
        FormatError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        FormatError::Invalid(msg.into())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RunError {
    #[error("run does not start in the initial configuration")]
    BadStart,
    #[error("step {0}: transition not enabled")]
    NotEnabled(usize),
    #[error("step {0}: configuration does not match the replayed one")]
    ConfigMismatch(usize),
    #[error("consumed letters do not spell the run's word")]
    WordMismatch,
    #[error("run has inconsistent lengths")]
    Shape,
    #[error("position {0} is not a step of the run")]
    NotAStep(usize),
    #[error("modes at the splice points differ")]
    ModeMismatch,
    #[error("position {0} is out of range")]
    OutOfRange(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("input alphabets differ")]
    AlphabetMismatch,
    #[error("letter `{0}` already belongs to the input alphabet")]
    LetterClash(char),
    #[error("encoding symbol clash: {0}")]
    EncodingOverflow(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("grammar exceeds the nonterminal cap of {cap} ({reached} reached)")]
    GrammarTooLarge { cap: usize, reached: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("strategy `{strategy}` proposed an illegal move at prefix {prefix:?}: {detail}")]
    IllegalMove { strategy: String, prefix: String, detail: String },
    #[error("invalid game parameters: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LanguageError {
    #[error("letter `{0}` is outside the language's alphabet")]
    AlphabetMismatch(char),
}
