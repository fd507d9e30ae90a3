//! Dependence records along the executed path, constant uniquification, and
//! the composed dependence sets the diagnosis works on.
//!
//! Every constant occurrence first gets a unique name (`c1`, `c2`, ...), so
//! that two occurrences of the same value stay distinguishable. A dependence
//! record `(target on source with op)` says the assigned variable took
//! influence from a source leaf through the given operator; records induced
//! by a governing guard are control records and never enter the composed
//! sets. Exclusion rules mark records the diagnosis may drop: a variable
//! copied onto itself carries no fresh information, and relational operators
//! only steer control.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::interp::Env;
use crate::lang::ast::*;
use crate::lang::emit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstContext {
    Expression,
    Condition,
}

impl ConstContext {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstContext::Expression => "expression",
            ConstContext::Condition => "condition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstEntry {
    pub id: String,
    pub value: i64,
    pub line: Line,
    /// Index among the constant leaves of the statement on `line`, left to
    /// right, starting at 0.
    pub occurrence: u32,
    pub context: ConstContext,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstantTable {
    pub entries: Vec<ConstEntry>,
}

impl ConstantTable {
    pub fn get(&self, id: &str) -> Option<&ConstEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn find_at(&self, line: Line, occurrence: u32) -> Option<&ConstEntry> {
        self.entries
            .iter()
            .find(|e| e.line == line && e.occurrence == occurrence)
    }

    /// Bindings that let a uniquified program execute directly.
    pub fn env(&self) -> Env {
        self.entries
            .iter()
            .map(|e| (e.id.clone(), e.value))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Picks a name prefix that cannot collide with program variables: `c`
/// normally, doubled as long as some variable looks like `c<digits>`.
fn constant_prefix(p: &Program) -> String {
    let mut names: BTreeSet<String> = p.assigned_vars();
    names.extend(p.inputs());
    let mut prefix = "c".to_string();
    let collides = |prefix: &str, names: &BTreeSet<String>| {
        names.iter().any(|n| {
            n.strip_prefix(prefix)
                .is_some_and(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()))
        })
    };
    while collides(&prefix, &names) {
        prefix.push('c');
    }
    prefix
}

struct Uniquifier {
    prefix: String,
    entries: Vec<ConstEntry>,
}

impl Uniquifier {
    fn rewrite(&mut self, e: &mut Expr, line: Line, context: ConstContext, occ: &mut u32) {
        match e {
            Expr::Const(v) => {
                let id = format!("{}{}", self.prefix, self.entries.len() + 1);
                self.entries.push(ConstEntry {
                    id: id.clone(),
                    value: *v,
                    line,
                    occurrence: *occ,
                    context,
                });
                *occ += 1;
                *e = Expr::ConstRef(id);
            }
            Expr::BinOp { left, right, .. } => {
                self.rewrite(left, line, context, occ);
                self.rewrite(right, line, context, occ);
            }
            _ => {}
        }
    }

    fn walk(&mut self, statements: &mut [Statement]) {
        for s in statements {
            match s {
                Statement::Assign(a) => {
                    let mut occ = 0;
                    self.rewrite(&mut a.expr, a.line, ConstContext::Expression, &mut occ);
                }
                Statement::If(i) => {
                    let mut occ = 0;
                    self.rewrite(&mut i.cond.left, i.line, ConstContext::Condition, &mut occ);
                    self.rewrite(&mut i.cond.right, i.line, ConstContext::Condition, &mut occ);
                    self.walk(&mut i.then_body);
                    self.walk(&mut i.else_body);
                }
            }
        }
    }
}

/// Replaces every constant occurrence with a fresh named reference, in
/// textual order, and returns the table mapping names back to values.
pub fn uniquify_constants(p: &Program) -> (Program, ConstantTable) {
    let mut u = Uniquifier { prefix: constant_prefix(p), entries: Vec::new() };
    let mut prog = p.clone();
    u.walk(&mut prog.statements);
    (prog, ConstantTable { entries: u.entries })
}

/// Undoes uniquification. The table must come from the same program.
pub fn inline_constants(p: &Program, table: &ConstantTable) -> Program {
    fn rewrite(e: &mut Expr, table: &ConstantTable) {
        match e {
            Expr::ConstRef(id) => {
                let entry = table.get(id).expect("constant table covers every reference");
                *e = Expr::Const(entry.value);
            }
            Expr::BinOp { left, right, .. } => {
                rewrite(left, table);
                rewrite(right, table);
            }
            _ => {}
        }
    }
    fn walk(statements: &mut [Statement], table: &ConstantTable) {
        for s in statements {
            match s {
                Statement::Assign(a) => rewrite(&mut a.expr, table),
                Statement::If(i) => {
                    rewrite(&mut i.cond.left, table);
                    rewrite(&mut i.cond.right, table);
                    walk(&mut i.then_body, table);
                    walk(&mut i.else_body, table);
                }
            }
        }
    }
    let mut prog = p.clone();
    walk(&mut prog.statements, table);
    prog
}

/// Renders a uniquified program as plain source: one `cN = value;` binding
/// per constant up front, then the body shifted down by the preamble length.
/// The result parses as an ordinary program that behaves like the original.
pub fn emit_uniquified(p: &Program, table: &ConstantTable) -> String {
    let n = table.len() as u32;
    let body = emit::emit_source(&p.with_lines_shifted(n));
    let mut lines: Vec<String> = body.lines().map(str::to_string).collect();
    lines.resize(lines.len().max(n as usize), String::new());
    for (i, entry) in table.entries.iter().enumerate() {
        debug_assert!(lines[i].is_empty());
        lines[i] = format!("{} = {};", entry.id, entry.value);
    }
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

/// Rewrites one constant occurrence of the original program. The entry
/// addresses the occurrence by line and leaf position, so it applies to the
/// program the table was extracted from, before uniquification.
pub fn set_constant(p: &Program, entry: &ConstEntry, value: i64) -> Option<Program> {
    p.replace_const_at(entry.line, entry.occurrence, value)
}

/// Static per-line facts for the whole program: what each line assigns and
/// reads, what each guard reads, and which guards govern each line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LineDeps {
    pub assigns: BTreeMap<Line, (String, BTreeSet<String>)>,
    pub conditions: BTreeMap<Line, BTreeSet<String>>,
    /// Guard lines governing each statement line, outermost first.
    pub governing: BTreeMap<Line, Vec<Line>>,
}

pub fn line_dependencies(p: &Program) -> LineDeps {
    fn walk(statements: &[Statement], stack: &mut Vec<Line>, out: &mut LineDeps) {
        for s in statements {
            out.governing.insert(s.line(), stack.clone());
            match s {
                Statement::Assign(a) => {
                    let reads = a.expr.vars().into_iter().collect();
                    out.assigns.insert(a.line, (a.target.clone(), reads));
                }
                Statement::If(i) => {
                    out.conditions.insert(i.line, i.cond.vars().into_iter().collect());
                    stack.push(i.line);
                    walk(&i.then_body, stack, out);
                    walk(&i.else_body, stack, out);
                    stack.pop();
                }
            }
        }
    }
    let mut out = LineDeps::default();
    walk(&p.statements, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepOp {
    Direct,
    Arith(BinOp),
    Rel(RelOp),
}

impl DepOp {
    pub fn symbol(self) -> &'static str {
        match self {
            DepOp::Direct => "=",
            DepOp::Arith(op) => op.symbol(),
            DepOp::Rel(op) => op.symbol(),
        }
    }
}

impl fmt::Display for DepOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DepSource {
    Var(String),
    Const(String),
}

impl DepSource {
    pub fn name(&self) -> &str {
        match self {
            DepSource::Var(n) | DepSource::Const(n) => n,
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, DepSource::Const(_))
    }
}

impl fmt::Display for DepSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    /// `v = v`: the direct copy of a variable onto itself.
    SelfAssignment,
    /// Relational operators steer control and transport no value.
    ControlOperator,
}

/// One dependence record: on `line`, `target` took influence from `source`
/// through `op`. Control records stem from governing guards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dependency {
    pub line: Line,
    pub target: String,
    pub source: DepSource,
    pub op: DepOp,
    pub control: bool,
    pub exclusion: Option<Exclusion>,
}

impl fmt::Display for Dependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} on {} with {})", self.target, self.source, self.op)?;
        if self.exclusion.is_some() {
            f.write_str("*")?;
        }
        Ok(())
    }
}

fn leaf_source(leaf: &Expr) -> DepSource {
    match leaf {
        Expr::Var(name) => DepSource::Var(name.clone()),
        Expr::ConstRef(id) => DepSource::Const(id.clone()),
        Expr::Const(v) => DepSource::Const(v.to_string()),
        Expr::BinOp { .. } => unreachable!("leaves are not operators"),
    }
}

/// Collects the dependence records of every path line, in line order. Data
/// records come from the assignment's own expression, leaf by leaf; the
/// records of the governing guards follow, outermost guard first, marked as
/// control records and excluded by operator.
pub fn extract_line_deps(p: &Program, path_lines: &BTreeSet<Line>) -> Vec<Dependency> {
    fn on_assign(a: &Assign, guards: &[(Line, RelExpr)], out: &mut Vec<Dependency>) {
        for (leaf, op) in a.expr.leaves_with_ops() {
            let source = leaf_source(leaf);
            let op = match op {
                None => DepOp::Direct,
                Some(b) => DepOp::Arith(b),
            };
            let exclusion = (op == DepOp::Direct && source == DepSource::Var(a.target.clone()))
                .then_some(Exclusion::SelfAssignment);
            out.push(Dependency {
                line: a.line,
                target: a.target.clone(),
                source,
                op,
                control: false,
                exclusion,
            });
        }
        for (_, rel) in guards {
            for side in [&rel.left, &rel.right] {
                for leaf in side.leaves() {
                    out.push(Dependency {
                        line: a.line,
                        target: a.target.clone(),
                        source: leaf_source(leaf),
                        op: DepOp::Rel(rel.op),
                        control: true,
                        exclusion: Some(Exclusion::ControlOperator),
                    });
                }
            }
        }
    }

    fn walk(
        statements: &[Statement],
        path_lines: &BTreeSet<Line>,
        guards: &mut Vec<(Line, RelExpr)>,
        out: &mut Vec<Dependency>,
    ) {
        for s in statements {
            if !path_lines.contains(&s.line()) {
                continue;
            }
            match s {
                Statement::Assign(a) => on_assign(a, guards, out),
                Statement::If(i) => {
                    guards.push((i.line, i.cond.clone()));
                    walk(&i.then_body, path_lines, guards, out);
                    walk(&i.else_body, path_lines, guards, out);
                    guards.pop();
                }
            }
        }
    }

    let mut out = Vec::new();
    walk(&p.statements, path_lines, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComposeOptions {
    pub include_constants: bool,
    pub apply_exclusions: bool,
    pub retain_ops: bool,
}

/// One element of a composed dependence set, with every line it stems from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepEntry {
    pub op: Option<DepOp>,
    pub target: String,
    pub source: DepSource,
    pub lines: BTreeSet<Line>,
}

impl DepEntry {
    fn min_line(&self) -> Line {
        self.lines.first().copied().unwrap_or(0)
    }
}

impl fmt::Display for DepEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.op {
            Some(op) => write!(f, "({}, ({}, {}))", op, self.target, self.source),
            None => write!(f, "({}, {})", self.target, self.source),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DepSet {
    pub entries: Vec<DepEntry>,
}

impl DepSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rendered(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.to_string()).collect()
    }

    pub fn contains_pair(&self, target: &str, source: &str) -> bool {
        self.entries
            .iter()
            .any(|e| e.target == target && e.source.name() == source)
    }

    pub fn find(&self, target: &str, source: &str) -> Option<&DepEntry> {
        self.entries
            .iter()
            .find(|e| e.target == target && e.source.name() == source)
    }
}

/// Deduplicating union of the records into set elements. Control records
/// never enter a composed set; composition does not chain dependences, it
/// only merges equal pairs and unions their lines.
pub fn compose_deps(deps: &[Dependency], opts: ComposeOptions) -> DepSet {
    let mut entries: Vec<DepEntry> = Vec::new();
    for d in deps {
        if d.control {
            continue;
        }
        if !opts.include_constants && d.source.is_const() {
            continue;
        }
        if opts.apply_exclusions && d.exclusion.is_some() {
            continue;
        }
        let op = opts.retain_ops.then_some(d.op);
        match entries
            .iter_mut()
            .find(|e| e.op == op && e.target == d.target && e.source == d.source)
        {
            Some(e) => {
                e.lines.insert(d.line);
            }
            None => entries.push(DepEntry {
                op,
                target: d.target.clone(),
                source: d.source.clone(),
                lines: BTreeSet::from([d.line]),
            }),
        }
    }
    entries.sort_by_key(|e| {
        (
            e.min_line(),
            e.target.clone(),
            e.source.name().to_string(),
            e.op.map(|o| o.symbol()).unwrap_or(""),
        )
    });
    DepSet { entries }
}

/// Variable-to-variable flow only: constants dropped, exclusions retained,
/// operators forgotten.
pub fn set1(deps: &[Dependency]) -> DepSet {
    compose_deps(
        deps,
        ComposeOptions { include_constants: false, apply_exclusions: false, retain_ops: false },
    )
}

/// Adds the expression constants to the pairs of the first set.
pub fn set2(deps: &[Dependency]) -> DepSet {
    compose_deps(
        deps,
        ComposeOptions { include_constants: true, apply_exclusions: false, retain_ops: false },
    )
}

/// The operator-tagged set the diagnosis works on, exclusions applied.
pub fn final_set(deps: &[Dependency]) -> DepSet {
    compose_deps(
        deps,
        ComposeOptions { include_constants: true, apply_exclusions: true, retain_ops: true },
    )
}
