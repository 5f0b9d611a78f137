use std::fmt;

use thiserror::Error;

/// A located syntax error. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        SyntaxError { line, col, message: message.into() }
    }
}

/// Errors raised while loading or grounding a domain description.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("line {line}: unknown sort `{sort}`")]
    UnknownSort { line: usize, sort: String },
    #[error("line {line}: unknown {what} `{name}`")]
    Unknown { line: usize, what: &'static str, name: String },
    #[error("line {line}: `{name}` expects {expected} argument(s), got {found}")]
    Arity { line: usize, name: String, expected: usize, found: usize },
    #[error("line {line}: argument {position} of `{name}` must be of sort `{expected}`, got `{found}`")]
    IllSorted { line: usize, name: String, position: usize, expected: String, found: String },
    #[error("line {line}: duplicate {what} `{name}`")]
    Duplicate { line: usize, what: &'static str, name: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("defined fluents depend on each other through negation: {0}")]
    NegativeCycle(String),
}

/// Errors raised while reading a narrative file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NarrativeError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("{0}")]
    Domain(#[from] DomainError),
    #[error("{0}")]
    Unresolved(String),
    #[error("no customer declared")]
    NoCustomer,
}

/// Question validation failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuestionError {
    #[error("`{0}` is not a declared physical action")]
    UnknownAction(String),
    #[error("who-pattern `{0}` must contain exactly one `?` slot")]
    Slots(String),
    #[error("`{0}` is not a declared instance")]
    UnknownInstance(String),
}

/// Reason a search branch was abandoned; the furthest one is reported when
/// no interpretation exists.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Failure {
    pub step: usize,
    pub story_step: Option<usize>,
    pub reason: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.story_step {
            Some(s) => write!(f, "story step {s} unsatisfiable near reasoning step {}: {}", self.step, self.reason),
            None => write!(f, "reasoning step {}: {}", self.step, self.reason),
        }
    }
}
