//! Renders a program back to source text.
//!
//! Statements are placed on their recorded physical lines, with blank lines
//! filling any gaps, so `parse(emit_source(p)) == p` for every valid program
//! that contains no constant references.

use std::collections::BTreeMap;

use super::ast::*;

fn prec(op: BinOp) -> u8 {
    match op {
        BinOp::Add | BinOp::Sub => 1,
        BinOp::Mul => 2,
    }
}

fn render_expr(e: &Expr, min_prec: u8) -> String {
    match e {
        Expr::Var(name) | Expr::ConstRef(name) => name.clone(),
        Expr::Const(v) => v.to_string(),
        Expr::BinOp { op, left, right } => {
            let text = format!(
                "{} {} {}",
                render_expr(left, prec(*op)),
                op.symbol(),
                render_expr(right, prec(*op) + 1)
            );
            if prec(*op) < min_prec {
                format!("({text})")
            } else {
                text
            }
        }
    }
}

pub fn render_rel(r: &RelExpr) -> String {
    format!(
        "{} {} {}",
        render_expr(&r.left, 0),
        r.op.symbol(),
        render_expr(&r.right, 0)
    )
}

pub fn render_assign(a: &Assign) -> String {
    format!("{} = {}", a.target, render_expr(&a.expr, 0))
}

fn last_line(statements: &[Statement]) -> Line {
    statements
        .iter()
        .map(|s| match s {
            Statement::Assign(a) => a.line,
            Statement::If(i) => i.line.max(last_line(&i.then_body)).max(last_line(&i.else_body)),
        })
        .max()
        .unwrap_or(0)
}

fn append(out: &mut BTreeMap<Line, String>, line: Line, text: &str) {
    out.entry(line).or_default().push_str(text);
}

fn emit_statement(out: &mut BTreeMap<Line, String>, s: &Statement, depth: usize, prefix: &str) {
    let indent = "    ".repeat(depth);
    match s {
        Statement::Assign(a) => {
            append(out, a.line, &format!("{indent}{prefix}{};", render_assign(a)));
        }
        Statement::If(i) => {
            append(out, i.line, &format!("{indent}{prefix}if ({})", render_rel(&i.cond)));
            // an unbraced `if` in the then arm would capture our `else`
            let shield = !i.else_body.is_empty()
                && matches!(i.then_body.as_slice(), [Statement::If(_)]);
            emit_arm(out, &i.then_body, depth, "then", shield);
            emit_arm(out, &i.else_body, depth, "else", false);
        }
    }
}

/// A one-statement arm goes on its own line behind `then`/`else`; a longer
/// (or force-braced) arm is braced, with the opening brace appended to the
/// previously written line and the closing brace appended to the arm's last
/// line.
fn emit_arm(
    out: &mut BTreeMap<Line, String>,
    arm: &[Statement],
    depth: usize,
    keyword: &str,
    force_braces: bool,
) {
    match arm.len() {
        0 => {}
        1 if !force_braces => emit_statement(out, &arm[0], depth + 1, &format!("{keyword} ")),
        _ => {
            let open_at = *out.keys().last().expect("arm follows its guard line");
            append(out, open_at, &format!(" {keyword} {{"));
            for s in arm {
                emit_statement(out, s, depth + 1, "");
            }
            append(out, last_line(arm), " }");
        }
    }
}

/// Renders the program with every statement on its recorded line.
pub fn emit_source(p: &Program) -> String {
    let mut out = BTreeMap::new();
    for s in &p.statements {
        emit_statement(&mut out, s, 0, "");
    }
    let max = out.keys().last().copied().unwrap_or(0);
    let mut text = String::new();
    for line in 1..=max {
        if let Some(content) = out.get(&line) {
            text.push_str(content);
        }
        text.push('\n');
    }
    text
}
