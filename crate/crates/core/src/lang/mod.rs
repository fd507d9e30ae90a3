//! The MiniImp language: syntax tree, parser, printer, and static checks.

pub mod ast;
pub mod emit;
pub mod parser;
pub mod validate;

pub use ast::{Assign, BinOp, Expr, IfStmt, Line, Program, RelExpr, RelOp, Statement};
pub use emit::emit_source;
pub use parser::parse;
pub use validate::validate;
