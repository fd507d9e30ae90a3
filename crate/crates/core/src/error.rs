//! Error type shared by every stage of the pipeline.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: u32, col: u32, msg: String },

    #[error("variable `{name}` may be read at line {line} before it is assigned")]
    UseBeforeAssign { name: String, line: u32 },

    #[error("statement line {line} is used more than once")]
    DuplicateLine { line: u32 },

    #[error("statement lines are not increasing at line {line}")]
    UnorderedLine { line: u32 },

    #[error("variable `{name}` is unbound{}", fmt_at(.line))]
    UnboundVariable { name: String, line: Option<u32> },

    #[error("arithmetic overflow{}", fmt_at(.line))]
    ArithmeticOverflow { line: Option<u32> },

    #[error("{branches} branch clauses exceed the path cap of {cap} ({paths} paths)")]
    PathExplosion { branches: u32, cap: u32, paths: u128 },

    #[error("trace is inconsistent with the block partition: {msg}")]
    InconsistentTrace { msg: String },

    #[error("target variable `{name}` is never assigned")]
    UnknownTarget { name: String },

    #[error("target variable `{name}` is not assigned on the executed path")]
    TargetNotAssigned { name: String },

    #[error("no constant with a + or - dependence is available to mutate")]
    NoConstantsToMutate,

    #[error("invalid inputs: {msg}")]
    InvalidInputs { msg: String },
}

fn fmt_at(line: &Option<u32>) -> String {
    match line {
        Some(n) => format!(" at line {n}"),
        None => String::new(),
    }
}
