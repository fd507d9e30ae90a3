//! Lexer and recursive descent parser for the textual program format.
//!
//! One physical source line holds one statement; the line a token starts on
//! becomes the statement's line number. `#` starts a comment running to the
//! end of the line. Arms of a conditional are either a single statement or a
//! braced group.

use super::ast::*;
use super::validate;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    If,
    Then,
    Else,
    Assign,
    Semi,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Plus,
    Minus,
    Star,
    Rel(RelOp),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

fn syntax(line: u32, col: u32, msg: impl Into<String>) -> Error {
    Error::Syntax { line, col, msg: msg.into() }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line = 1u32;
    let mut col = 1u32;

    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            '0'..='9' => {
                let mut text = String::new();
                while let Some(c) = chars.peek() {
                    if c.is_ascii_digit() {
                        text.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                let value: i64 = text
                    .parse()
                    .map_err(|_| syntax(tline, tcol, "integer literal out of range"))?;
                out.push(Token { tok: Tok::Int(value), line: tline, col: tcol });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut text = String::new();
                while let Some(c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || *c == '_' {
                        text.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                let tok = match text.as_str() {
                    "if" => Tok::If,
                    "then" => Tok::Then,
                    "else" => Tok::Else,
                    _ => Tok::Ident(text),
                };
                out.push(Token { tok, line: tline, col: tcol });
            }
            _ => {
                bump(&mut chars);
                let next = chars.peek().copied();
                let tok = match (c, next) {
                    ('=', Some('=')) => {
                        bump(&mut chars);
                        Tok::Rel(RelOp::Eq)
                    }
                    ('=', _) => Tok::Assign,
                    ('!', Some('=')) => {
                        bump(&mut chars);
                        Tok::Rel(RelOp::Ne)
                    }
                    ('<', Some('=')) => {
                        bump(&mut chars);
                        Tok::Rel(RelOp::Le)
                    }
                    ('<', _) => Tok::Rel(RelOp::Lt),
                    ('>', Some('=')) => {
                        bump(&mut chars);
                        Tok::Rel(RelOp::Ge)
                    }
                    ('>', _) => Tok::Rel(RelOp::Gt),
                    (';', _) => Tok::Semi,
                    ('(', _) => Tok::LParen,
                    (')', _) => Tok::RParen,
                    ('{', _) => Tok::LBrace,
                    ('}', _) => Tok::RBrace,
                    ('+', _) => Tok::Plus,
                    ('-', _) => Tok::Minus,
                    ('*', _) => Tok::Star,
                    _ => return Err(syntax(tline, tcol, format!("unexpected character `{c}`"))),
                };
                out.push(Token { tok, line: tline, col: tcol });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (u32, u32) {
        match self.peek() {
            Some(t) => (t.line, t.col),
            None => match self.tokens.last() {
                Some(t) => (t.line, t.col + 1),
                None => (1, 1),
            },
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token> {
        let (line, col) = self.here();
        match self.next() {
            Some(t) if t.tok == want => Ok(t),
            Some(t) => Err(syntax(t.line, t.col, format!("expected {what}"))),
            None => Err(syntax(line, col, format!("expected {what}, found end of input"))),
        }
    }

    fn parse_program(&mut self) -> Result<Program> {
        let statements = self.parse_statements(false)?;
        if let Some(t) = self.peek() {
            return Err(syntax(t.line, t.col, "unexpected token after program"));
        }
        Ok(Program { statements })
    }

    /// Parses statements until end of input or, inside a braced arm, until
    /// the closing brace (which is consumed).
    fn parse_statements(&mut self, braced: bool) -> Result<Vec<Statement>> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None => {
                    if braced {
                        let (line, col) = self.here();
                        return Err(syntax(line, col, "expected `}`, found end of input"));
                    }
                    return Ok(out);
                }
                Some(t) if t.tok == Tok::RBrace => {
                    if braced {
                        self.next();
                        return Ok(out);
                    }
                    return Err(syntax(t.line, t.col, "unexpected `}`"));
                }
                _ => out.push(self.parse_statement()?),
            }
        }
    }

    fn parse_statement(&mut self) -> Result<Statement> {
        let (line, col) = self.here();
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Ident(_)) => self.parse_assign().map(Statement::Assign),
            Some(Tok::If) => self.parse_if().map(Statement::If),
            Some(_) => Err(syntax(line, col, "expected a statement")),
            None => Err(syntax(line, col, "expected a statement, found end of input")),
        }
    }

    fn parse_assign(&mut self) -> Result<Assign> {
        let t = self.next().unwrap();
        let target = match t.tok {
            Tok::Ident(name) => name,
            _ => unreachable!(),
        };
        self.expect(Tok::Assign, "`=`")?;
        let expr = self.parse_expr()?;
        if matches!(self.peek(), Some(t) if t.tok == Tok::Semi) {
            self.next();
        }
        Ok(Assign { line: t.line, target, expr })
    }

    fn parse_if(&mut self) -> Result<IfStmt> {
        let t = self.next().unwrap();
        self.expect(Tok::LParen, "`(` after `if`")?;
        let cond = self.parse_rel()?;
        self.expect(Tok::RParen, "`)` after condition")?;
        let then_body = if matches!(self.peek(), Some(t) if t.tok == Tok::Then) {
            self.next();
            self.parse_arm()?
        } else {
            Vec::new()
        };
        let else_body = if matches!(self.peek(), Some(t) if t.tok == Tok::Else) {
            self.next();
            self.parse_arm()?
        } else {
            Vec::new()
        };
        Ok(IfStmt { line: t.line, cond, then_body, else_body })
    }

    fn parse_arm(&mut self) -> Result<Vec<Statement>> {
        if matches!(self.peek(), Some(t) if t.tok == Tok::LBrace) {
            self.next();
            self.parse_statements(true)
        } else {
            Ok(vec![self.parse_statement()?])
        }
    }

    fn parse_rel(&mut self) -> Result<RelExpr> {
        let left = self.parse_expr()?;
        let (line, col) = self.here();
        let op = match self.next() {
            Some(Token { tok: Tok::Rel(op), .. }) => op,
            Some(t) => return Err(syntax(t.line, t.col, "expected a relational operator")),
            None => return Err(syntax(line, col, "expected a relational operator")),
        };
        let right = self.parse_expr()?;
        Ok(RelExpr { op, left, right })
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut expr = self.parse_term()?;
        loop {
            let op = match self.peek().map(|t| &t.tok) {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(expr),
            };
            self.next();
            let rhs = self.parse_term()?;
            expr = Expr::bin(op, expr, rhs);
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut expr = self.parse_factor()?;
        while matches!(self.peek(), Some(t) if t.tok == Tok::Star) {
            self.next();
            let rhs = self.parse_factor()?;
            expr = Expr::bin(BinOp::Mul, expr, rhs);
        }
        Ok(expr)
    }

    fn parse_factor(&mut self) -> Result<Expr> {
        let (line, col) = self.here();
        match self.next() {
            Some(Token { tok: Tok::Int(v), .. }) => Ok(Expr::Const(v)),
            Some(Token { tok: Tok::Minus, .. }) => match self.next() {
                Some(Token { tok: Tok::Int(v), .. }) => Ok(Expr::Const(-v)),
                Some(t) => Err(syntax(t.line, t.col, "expected an integer after unary `-`")),
                None => Err(syntax(line, col, "expected an integer after unary `-`")),
            },
            Some(Token { tok: Tok::Ident(name), .. }) => Ok(Expr::Var(name)),
            Some(Token { tok: Tok::LParen, .. }) => {
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(t) => Err(syntax(t.line, t.col, "expected an expression")),
            None => Err(syntax(line, col, "expected an expression, found end of input")),
        }
    }
}

/// Parses and validates a program. Validation checks line numbering and
/// rejects variables that may be read before assignment.
pub fn parse(src: &str) -> Result<Program> {
    let tokens = lex(src)?;
    let mut parser = Parser { tokens, pos: 0 };
    let program = parser.parse_program()?;
    validate::validate(&program)?;
    Ok(program)
}
