//! Seeded random programs for the property suites: small branching programs
//! over a handful of variables, plus helpers to plant a single constant
//! fault and to draw random inputs.

use std::collections::BTreeSet;

use rand::Rng;

use crate::interp::Env;
use crate::lang::ast::*;

/// Generated programs always end with an assignment to this variable.
pub const TARGET: &str = "out";

const LOCALS: [&str; 5] = ["v1", "v2", "v3", "v4", "v5"];
const INPUTS: [&str; 3] = ["a", "b", "c"];

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_stmts: usize,
    pub max_branches: u32,
    pub nested: bool,
    pub allow_mul: bool,
    pub input_count: usize,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            max_stmts: 18,
            max_branches: 4,
            nested: true,
            allow_mul: true,
            input_count: 2,
        }
    }
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    cfg: &'a GenConfig,
    line: Line,
    branches: u32,
    stmts: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn next_line(&mut self) -> Line {
        self.line += 1;
        self.line
    }

    fn pick_var(&mut self, defined: &BTreeSet<String>) -> String {
        let mut pool: Vec<&str> = INPUTS[..self.cfg.input_count].to_vec();
        pool.extend(defined.iter().map(String::as_str));
        pool[self.rng.random_range(0..pool.len())].to_string()
    }

    fn leaf(&mut self, defined: &BTreeSet<String>) -> Expr {
        if self.rng.random_ratio(2, 5) {
            Expr::Const(self.rng.random_range(0..=9))
        } else {
            Expr::Var(self.pick_var(defined))
        }
    }

    fn op(&mut self) -> BinOp {
        match self.rng.random_range(0..100u32) {
            0..55 => BinOp::Add,
            55..85 => BinOp::Sub,
            _ if self.cfg.allow_mul => BinOp::Mul,
            _ => BinOp::Sub,
        }
    }

    fn expr(&mut self, defined: &BTreeSet<String>) -> Expr {
        let n = self.rng.random_range(1..=3);
        let mut e = self.leaf(defined);
        for _ in 1..n {
            let op = self.op();
            let rhs = self.leaf(defined);
            e = Expr::bin(op, e, rhs);
        }
        e
    }

    fn rel(&mut self, defined: &BTreeSet<String>) -> RelExpr {
        const OPS: [RelOp; 6] = [RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge, RelOp::Eq, RelOp::Ne];
        RelExpr {
            op: OPS[self.rng.random_range(0..OPS.len())],
            left: Expr::Var(self.pick_var(defined)),
            right: self.leaf(defined),
        }
    }

    fn assign(&mut self, defined: &mut BTreeSet<String>) -> Statement {
        let target = LOCALS[self.rng.random_range(0..LOCALS.len())].to_string();
        let expr = self.expr(defined);
        defined.insert(target.clone());
        self.stmts += 1;
        Statement::Assign(Assign { line: self.next_line(), target, expr })
    }

    fn arm(&mut self, depth: u32, len: usize, defined: &mut BTreeSet<String>) -> Vec<Statement> {
        let mut out = Vec::new();
        for _ in 0..len {
            let nest = depth == 0
                && self.cfg.nested
                && self.branches < self.cfg.max_branches
                && self.rng.random_bool(0.2);
            if nest {
                out.push(self.conditional(depth + 1, defined));
            } else {
                out.push(self.assign(defined));
            }
        }
        out
    }

    fn conditional(&mut self, depth: u32, defined: &mut BTreeSet<String>) -> Statement {
        self.branches += 1;
        self.stmts += 1;
        let line = self.next_line();
        let cond = self.rel(defined);
        let mut then_defs = defined.clone();
        let then_len = self.rng.random_range(1..=2);
        let then_body = self.arm(depth, then_len, &mut then_defs);
        let mut else_defs = defined.clone();
        let else_len = self.rng.random_range(0..=2);
        let else_body = self.arm(depth, else_len, &mut else_defs);
        *defined = then_defs.intersection(&else_defs).cloned().collect();
        Statement::If(IfStmt { line, cond, then_body, else_body })
    }
}

/// Draws a small branching program. The result always validates, reads only
/// assigned variables or inputs, and ends with an assignment to `out`.
pub fn random_program<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Program {
    let mut g = Gen { rng, cfg, line: 0, branches: 0, stmts: 0 };
    let mut defined = BTreeSet::new();
    let mut statements = Vec::new();
    let goal = g.rng.random_range(4..=cfg.max_stmts.max(4));
    while g.stmts < goal {
        let branch = g.branches < cfg.max_branches && g.rng.random_bool(0.35);
        if branch {
            statements.push(g.conditional(0, &mut defined));
        } else {
            statements.push(g.assign(&mut defined));
        }
    }
    let expr = g.expr(&defined);
    statements.push(Statement::Assign(Assign {
        line: g.next_line(),
        target: TARGET.to_string(),
        expr,
    }));
    Program { statements }
}

/// A program with one constant nudged off its original value.
#[derive(Debug, Clone)]
pub struct SeededFault {
    pub program: Program,
    pub line: Line,
    /// Constant-leaf index within the statement on `line`.
    pub occurrence: u32,
    pub original: i64,
    pub delta: i64,
}

/// Plants a fault at a random expression constant that enters through `+` or
/// `-`. Returns `None` when the program has no such constant.
pub fn seed_constant_fault<R: Rng>(rng: &mut R, p: &Program) -> Option<SeededFault> {
    fn collect(statements: &[Statement], sites: &mut Vec<(Line, u32, i64)>) {
        for s in statements {
            match s {
                Statement::Assign(a) => {
                    let mut const_idx = 0;
                    for (leaf, op) in a.expr.leaves_with_ops() {
                        if let Expr::Const(v) = leaf {
                            if matches!(op, Some(BinOp::Add | BinOp::Sub)) {
                                sites.push((a.line, const_idx, *v));
                            }
                            const_idx += 1;
                        }
                    }
                }
                Statement::If(i) => {
                    collect(&i.then_body, sites);
                    collect(&i.else_body, sites);
                }
            }
        }
    }
    let mut sites = Vec::new();
    collect(&p.statements, &mut sites);
    if sites.is_empty() {
        return None;
    }
    let (line, occurrence, original) = sites[rng.random_range(0..sites.len())];
    let delta = loop {
        let d = rng.random_range(-4..=4i64);
        if d != 0 {
            break d;
        }
    };
    let program = p
        .replace_const_at(line, occurrence, original + delta)
        .expect("site was collected from this program");
    Some(SeededFault { program, line, occurrence, original, delta })
}

/// Random bindings for every input parameter of the program.
pub fn random_inputs<R: Rng>(rng: &mut R, p: &Program, lo: i64, hi: i64) -> Env {
    p.inputs()
        .into_iter()
        .map(|name| (name, rng.random_range(lo..=hi)))
        .collect()
}
