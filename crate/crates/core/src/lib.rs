//! Fault localization and repair suggestions for MiniImp, a small imperative
//! language of integer assignments and two-way conditionals.
//!
//! Given a program, concrete inputs, a target variable, and the value the
//! target should have ended with, the pipeline narrows the search for the
//! fault in four steps:
//!
//! 1. partition the program into blocks and form the all-path formula,
//! 2. prune the formula to the executed, target-relevant path,
//! 3. extract operator-tagged dependence records along that path and compose
//!    them into dependence sets with unique constant names,
//! 4. drop pairs that would blame untouched inputs, report the remaining
//!    lines, and try `value +/- od` for every suspect constant, keeping the
//!    mutations that actually produce the desired output.
//!
//! The `plofc` binary exposes the pipeline on the command line; `report`
//! renders the intermediate artifacts as text, JSON, and DOT graphs.

pub mod blocks;
pub mod deps;
pub mod diagnose;
pub mod dot;
pub mod error;
pub mod gen;
pub mod interp;
pub mod lang;
pub mod report;

pub use error::{Error, Result};
