//! Abstract syntax for MiniImp programs.
//!
//! Statements carry the physical source line they live on. Line numbers are
//! part of program identity: every later stage (blocks, paths, dependence
//! records, repair suggestions) points back at them.

use std::collections::BTreeSet;

pub type Line = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub statements: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Assign(Assign),
    If(IfStmt),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assign {
    pub line: Line,
    pub target: String,
    pub expr: Expr,
}

/// A conditional with a single relational guard. Either arm may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IfStmt {
    pub line: Line,
    pub cond: RelExpr,
    pub then_body: Vec<Statement>,
    pub else_body: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Const(i64),
    /// A named constant introduced by constant uniquification. The parser
    /// never produces this; evaluation resolves it through the environment.
    ConstRef(String),
    BinOp {
        op: BinOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelExpr {
    pub op: RelOp,
    pub left: Expr,
    pub right: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
        }
    }
}

impl Statement {
    /// The line of the statement itself; for a conditional this is the line
    /// holding the guard.
    pub fn line(&self) -> Line {
        match self {
            Statement::Assign(a) => a.line,
            Statement::If(i) => i.line,
        }
    }
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, left: Expr, right: Expr) -> Expr {
        Expr::BinOp {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// All leaves (variables, constants, constant refs) left to right.
    pub fn leaves(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        match self {
            Expr::BinOp { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
            leaf => out.push(leaf),
        }
    }

    /// Leaves paired with the operator that combines each of them into the
    /// expression: the operator of the leaf's direct parent node. The first
    /// leaf flows in directly and gets `None`.
    pub fn leaves_with_ops(&self) -> Vec<(&Expr, Option<BinOp>)> {
        let mut out = Vec::new();
        self.collect_leaves_with_ops(None, &mut out);
        if let Some(first) = out.first_mut() {
            first.1 = None;
        }
        out
    }

    fn collect_leaves_with_ops<'a>(
        &'a self,
        parent: Option<BinOp>,
        out: &mut Vec<(&'a Expr, Option<BinOp>)>,
    ) {
        match self {
            Expr::BinOp { op, left, right } => {
                left.collect_leaves_with_ops(Some(*op), out);
                right.collect_leaves_with_ops(Some(*op), out);
            }
            leaf => out.push((leaf, parent)),
        }
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Var(name) => out.push(name.clone()),
            Expr::BinOp { left, right, .. } => {
                left.collect_vars(out);
                right.collect_vars(out);
            }
            _ => {}
        }
    }

    /// Variable names read by the expression, left to right, with repeats.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }
}

impl RelExpr {
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.left.collect_vars(&mut out);
        self.right.collect_vars(&mut out);
        out
    }
}

fn visit<'a>(statements: &'a [Statement], f: &mut impl FnMut(&'a Statement)) {
    for s in statements {
        f(s);
        if let Statement::If(i) = s {
            visit(&i.then_body, f);
            visit(&i.else_body, f);
        }
    }
}

impl Program {
    pub fn empty() -> Program {
        Program { statements: Vec::new() }
    }

    /// Every statement line in textual order, conditionals before their arms.
    pub fn lines(&self) -> Vec<Line> {
        let mut out = Vec::new();
        visit(&self.statements, &mut |s| out.push(s.line()));
        out
    }

    pub fn max_line(&self) -> Line {
        self.lines().into_iter().max().unwrap_or(0)
    }

    pub fn statement_count(&self) -> usize {
        let mut n = 0;
        visit(&self.statements, &mut |_| n += 1);
        n
    }

    /// Names assigned anywhere in the program.
    pub fn assigned_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        visit(&self.statements, &mut |s| {
            if let Statement::Assign(a) = s {
                out.insert(a.target.clone());
            }
        });
        out
    }

    /// Input parameters: variables that are read somewhere but assigned
    /// nowhere, in order of first appearance.
    pub fn inputs(&self) -> Vec<String> {
        let assigned = self.assigned_vars();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        visit(&self.statements, &mut |s| {
            let reads = match s {
                Statement::Assign(a) => a.expr.vars(),
                Statement::If(i) => i.cond.vars(),
            };
            for name in reads {
                if !assigned.contains(&name) && seen.insert(name.clone()) {
                    out.push(name);
                }
            }
        });
        out
    }

    pub fn statement_at(&self, line: Line) -> Option<&Statement> {
        fn find(statements: &[Statement], line: Line) -> Option<&Statement> {
            for s in statements {
                if s.line() == line {
                    return Some(s);
                }
                if let Statement::If(i) = s {
                    if let Some(hit) = find(&i.then_body, line).or_else(|| find(&i.else_body, line)) {
                        return Some(hit);
                    }
                }
            }
            None
        }
        find(&self.statements, line)
    }

    /// The program restricted to the given lines. A conditional survives only
    /// if its guard line is kept; arms are filtered recursively. Dropping a
    /// guard drops the whole construct.
    pub fn restrict_to_lines(&self, keep: &BTreeSet<Line>) -> Program {
        fn filter(statements: &[Statement], keep: &BTreeSet<Line>) -> Vec<Statement> {
            let mut out = Vec::new();
            for s in statements {
                match s {
                    Statement::Assign(a) => {
                        if keep.contains(&a.line) {
                            out.push(Statement::Assign(a.clone()));
                        }
                    }
                    Statement::If(i) => {
                        if keep.contains(&i.line) {
                            out.push(Statement::If(IfStmt {
                                line: i.line,
                                cond: i.cond.clone(),
                                then_body: filter(&i.then_body, keep),
                                else_body: filter(&i.else_body, keep),
                            }));
                        }
                    }
                }
            }
            out
        }
        Program { statements: filter(&self.statements, keep) }
    }

    /// The same program moved down by `delta` physical lines.
    pub fn with_lines_shifted(&self, delta: u32) -> Program {
        fn shift(statements: &[Statement], delta: u32) -> Vec<Statement> {
            statements
                .iter()
                .map(|s| match s {
                    Statement::Assign(a) => Statement::Assign(Assign {
                        line: a.line + delta,
                        target: a.target.clone(),
                        expr: a.expr.clone(),
                    }),
                    Statement::If(i) => Statement::If(IfStmt {
                        line: i.line + delta,
                        cond: i.cond.clone(),
                        then_body: shift(&i.then_body, delta),
                        else_body: shift(&i.else_body, delta),
                    }),
                })
                .collect()
        }
        Program { statements: shift(&self.statements, delta) }
    }

    /// Replace the `occurrence`-th constant leaf (counting from 0, left to
    /// right) of the statement at `line` with a new value. For a conditional
    /// the guard's leaves are counted, left operand first. Returns `None`
    /// when the line or the occurrence does not exist.
    pub fn replace_const_at(&self, line: Line, occurrence: u32, value: i64) -> Option<Program> {
        let mut prog = self.clone();
        fn rewrite_expr(e: &mut Expr, counter: &mut u32, occurrence: u32, value: i64) -> bool {
            match e {
                Expr::Const(v) => {
                    let hit = *counter == occurrence;
                    *counter += 1;
                    if hit {
                        *v = value;
                    }
                    hit
                }
                Expr::BinOp { left, right, .. } => {
                    rewrite_expr(left, counter, occurrence, value)
                        || rewrite_expr(right, counter, occurrence, value)
                }
                _ => false,
            }
        }
        fn rewrite(statements: &mut [Statement], line: Line, occurrence: u32, value: i64) -> bool {
            for s in statements {
                match s {
                    Statement::Assign(a) if a.line == line => {
                        let mut counter = 0;
                        return rewrite_expr(&mut a.expr, &mut counter, occurrence, value);
                    }
                    Statement::Assign(_) => {}
                    Statement::If(i) => {
                        if i.line == line {
                            let mut counter = 0;
                            return rewrite_expr(&mut i.cond.left, &mut counter, occurrence, value)
                                || rewrite_expr(&mut i.cond.right, &mut counter, occurrence, value);
                        }
                        if rewrite(&mut i.then_body, line, occurrence, value)
                            || rewrite(&mut i.else_body, line, occurrence, value)
                        {
                            return true;
                        }
                    }
                }
            }
            false
        }
        rewrite(&mut prog.statements, line, occurrence, value).then_some(prog)
    }
}
