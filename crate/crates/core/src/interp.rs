//! Concrete execution of programs over 64-bit integers.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lang::ast::*;

/// Variable bindings. Constant references introduced by uniquification
/// resolve through the environment as well.
pub type Env = BTreeMap<String, i64>;

pub fn env_from<const N: usize>(pairs: [(&str, i64); N]) -> Env {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// What a single execution did: the statement lines in execution order, the
/// decision taken at each executed guard, and the final variable bindings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub executed_lines: Vec<Line>,
    pub branch_decisions: Vec<(Line, bool)>,
    pub final_env: Env,
}

impl Trace {
    pub fn took_then(&self, line: Line) -> Option<bool> {
        self.branch_decisions
            .iter()
            .find(|(l, _)| *l == line)
            .map(|(_, t)| *t)
    }
}

pub fn eval_expr(e: &Expr, env: &Env) -> Result<i64> {
    match e {
        Expr::Const(v) => Ok(*v),
        Expr::Var(name) | Expr::ConstRef(name) => env
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnboundVariable { name: name.clone(), line: None }),
        Expr::BinOp { op, left, right } => {
            let l = eval_expr(left, env)?;
            let r = eval_expr(right, env)?;
            let combined = match op {
                BinOp::Add => l.checked_add(r),
                BinOp::Sub => l.checked_sub(r),
                BinOp::Mul => l.checked_mul(r),
            };
            combined.ok_or(Error::ArithmeticOverflow { line: None })
        }
    }
}

pub fn eval_rel(r: &RelExpr, env: &Env) -> Result<bool> {
    let l = eval_expr(&r.left, env)?;
    let rv = eval_expr(&r.right, env)?;
    Ok(match r.op {
        RelOp::Lt => l < rv,
        RelOp::Le => l <= rv,
        RelOp::Gt => l > rv,
        RelOp::Ge => l >= rv,
        RelOp::Eq => l == rv,
        RelOp::Ne => l != rv,
    })
}

fn at_line(err: Error, line: Line) -> Error {
    match err {
        Error::UnboundVariable { name, line: None } => {
            Error::UnboundVariable { name, line: Some(line) }
        }
        Error::ArithmeticOverflow { line: None } => Error::ArithmeticOverflow { line: Some(line) },
        other => other,
    }
}

fn run(statements: &[Statement], env: &mut Env, trace: &mut Trace) -> Result<()> {
    for s in statements {
        match s {
            Statement::Assign(a) => {
                trace.executed_lines.push(a.line);
                let value = eval_expr(&a.expr, env).map_err(|e| at_line(e, a.line))?;
                env.insert(a.target.clone(), value);
            }
            Statement::If(i) => {
                trace.executed_lines.push(i.line);
                let took_then = eval_rel(&i.cond, env).map_err(|e| at_line(e, i.line))?;
                trace.branch_decisions.push((i.line, took_then));
                let arm = if took_then { &i.then_body } else { &i.else_body };
                run(arm, env, trace)?;
            }
        }
    }
    Ok(())
}

/// Runs the program on the given inputs. The environment must bind every
/// variable the executed path reads; a missing binding surfaces as an
/// unbound-variable error at the reading line.
pub fn execute(p: &Program, inputs: &Env) -> Result<Trace> {
    let mut env = inputs.clone();
    let mut trace = Trace {
        executed_lines: Vec::new(),
        branch_decisions: Vec::new(),
        final_env: Env::new(),
    };
    run(&p.statements, &mut env, &mut trace)?;
    trace.final_env = env;
    Ok(trace)
}
