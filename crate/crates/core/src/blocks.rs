//! Block partition, all-path formula, path enumeration, and the two pruning
//! steps that narrow the formula down to the executed, target-relevant path.
//!
//! A block is either a maximal run of straight-line assignments or one arm of
//! a conditional. Arm blocks replicate the guard line, so taking either arm
//! explains the guard's execution. Each conditional contributes a two-literal
//! clause `(B or not-B)`; the conjunction of all clauses over the program
//! order is the all-path formula.

use std::collections::BTreeSet;
use std::fmt;

use crate::deps::LineDeps;
use crate::error::{Error, Result};
use crate::interp::Trace;
use crate::lang::ast::*;

pub const DEFAULT_PATH_CAP: u32 = 20;

/// Block name: `A`, `B`, ... `Z`, `A1`, `B1`, ... The two arms of one
/// conditional share a sequence number; the else arm is the negated form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub seq: u32,
    pub negated: bool,
}

impl Label {
    pub fn plain(seq: u32) -> Label {
        Label { seq, negated: false }
    }

    pub fn negation(self) -> Label {
        Label { seq: self.seq, negated: !self.negated }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "\u{ac}")?;
        }
        let letter = (b'A' + (self.seq % 26) as u8) as char;
        write!(f, "{letter}")?;
        if self.seq >= 26 {
            write!(f, "{}", self.seq / 26)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Linear,
    Then,
    Else,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub label: Label,
    pub kind: BlockKind,
    /// Statement lines in ascending order. For an arm block the guard line
    /// comes first, followed by the arm's direct assignments; statements of
    /// conditionals nested in the arm belong to their own blocks.
    pub lines: Vec<Line>,
    pub guard_line: Option<Line>,
}

impl Block {
    pub fn is_branch(&self) -> bool {
        !matches!(self.kind, BlockKind::Linear)
    }

    pub fn line_set(&self) -> BTreeSet<Line> {
        self.lines.iter().copied().collect()
    }
}

pub fn block<'a>(blocks: &'a [Block], label: Label) -> Option<&'a Block> {
    blocks.iter().find(|b| b.label == label)
}

struct Builder {
    seq: u32,
    out: Vec<Block>,
}

impl Builder {
    fn flush_linear(&mut self, pending: &mut Vec<Line>) {
        if pending.is_empty() {
            return;
        }
        let label = Label::plain(self.seq);
        self.seq += 1;
        self.out.push(Block {
            label,
            kind: BlockKind::Linear,
            lines: std::mem::take(pending),
            guard_line: None,
        });
    }

    fn walk_sequence(&mut self, statements: &[Statement]) {
        let mut pending = Vec::new();
        for s in statements {
            match s {
                Statement::Assign(a) => pending.push(a.line),
                Statement::If(i) => {
                    self.flush_linear(&mut pending);
                    self.conditional(i);
                }
            }
        }
        self.flush_linear(&mut pending);
    }

    fn conditional(&mut self, i: &IfStmt) {
        let then_label = Label::plain(self.seq);
        self.seq += 1;
        self.out.push(Block {
            label: then_label,
            kind: BlockKind::Then,
            lines: arm_lines(i.line, &i.then_body),
            guard_line: Some(i.line),
        });
        self.out.push(Block {
            label: then_label.negation(),
            kind: BlockKind::Else,
            lines: arm_lines(i.line, &i.else_body),
            guard_line: Some(i.line),
        });
        self.walk_arm(&i.then_body);
        self.walk_arm(&i.else_body);
    }

    /// Direct assignments of an arm already live in the arm's block; only
    /// conditionals nested in the arm produce further clauses.
    fn walk_arm(&mut self, statements: &[Statement]) {
        for s in statements {
            if let Statement::If(i) = s {
                self.conditional(i);
            }
        }
    }
}

fn arm_lines(guard: Line, statements: &[Statement]) -> Vec<Line> {
    let mut lines = vec![guard];
    for s in statements {
        if let Statement::Assign(a) = s {
            lines.push(a.line);
        }
    }
    lines
}

/// Partitions the program into labeled blocks in clause order: each block is
/// a maximal assignment run or one arm of a conditional, and the two arms of
/// a conditional are adjacent.
pub fn build_blocks(p: &Program) -> Vec<Block> {
    let mut b = Builder { seq: 0, out: Vec::new() };
    b.walk_sequence(&p.statements);
    b.out
}

/// One conjunct of the all-path formula: a single linear block or the two
/// arms of one conditional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub alternatives: Vec<Label>,
}

impl Clause {
    pub fn is_branch(&self) -> bool {
        self.alternatives.len() == 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathFormula {
    pub clauses: Vec<Clause>,
}

impl PathFormula {
    pub fn branch_count(&self) -> u32 {
        self.clauses.iter().filter(|c| c.is_branch()).count() as u32
    }
}

impl fmt::Display for PathFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                if c.is_branch() {
                    format!("({} \u{2228} {})", c.alternatives[0], c.alternatives[1])
                } else {
                    c.alternatives[0].to_string()
                }
            })
            .collect();
        write!(f, "{}", parts.join(" \u{2227} "))
    }
}

/// Builds the conjunction of clauses over the blocks in order.
pub fn all_path_formula(blocks: &[Block]) -> PathFormula {
    let mut clauses = Vec::new();
    let mut iter = blocks.iter().peekable();
    while let Some(b) = iter.next() {
        match b.kind {
            BlockKind::Linear => clauses.push(Clause { alternatives: vec![b.label] }),
            BlockKind::Then => {
                let partner = iter.next().expect("else block follows its then block");
                debug_assert_eq!(partner.label, b.label.negation());
                clauses.push(Clause { alternatives: vec![b.label, partner.label] });
            }
            BlockKind::Else => unreachable!("else block without preceding then block"),
        }
    }
    PathFormula { clauses }
}

/// One path through the formula: a choice of exactly one block per clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionPath {
    pub chosen: Vec<Label>,
}

impl ExecutionPath {
    pub fn contains(&self, label: Label) -> bool {
        self.chosen.contains(&label)
    }

    pub fn lines(&self, blocks: &[Block]) -> BTreeSet<Line> {
        let mut out = BTreeSet::new();
        for label in &self.chosen {
            if let Some(b) = block(blocks, *label) {
                out.extend(b.lines.iter().copied());
            }
        }
        out
    }
}

impl fmt::Display for ExecutionPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.chosen.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" \u{2227} "))
    }
}

/// Expands the formula into all `2^b` paths, then-arm first. The first
/// branch clause varies slowest. Refuses to expand past `cap` branches.
pub fn enumerate_paths(formula: &PathFormula, cap: u32) -> Result<Vec<ExecutionPath>> {
    let b = formula.branch_count();
    if b > cap {
        let paths = if b < 128 { 1u128 << b } else { u128::MAX };
        return Err(Error::PathExplosion { branches: b, cap, paths });
    }
    let count = 1usize << b;
    let mut out = Vec::with_capacity(count);
    for mask in 0..count {
        let mut chosen = Vec::with_capacity(formula.clauses.len());
        let mut branch_index = 0;
        for clause in &formula.clauses {
            if clause.is_branch() {
                let take_else = (mask >> (b - 1 - branch_index)) & 1 == 1;
                chosen.push(clause.alternatives[usize::from(take_else)]);
                branch_index += 1;
            } else {
                chosen.push(clause.alternatives[0]);
            }
        }
        out.push(ExecutionPath { chosen });
    }
    Ok(out)
}

/// The runtime pruning result: the path the trace actually took, plus every
/// block the pruning removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimePath {
    pub path: ExecutionPath,
    pub removed: Vec<Label>,
}

/// Selects the executed block of every clause from the trace. Branch clauses
/// resolve through the recorded guard decisions; a clause whose guard never
/// ran (an arm of an unexecuted conditional) drops out entirely, both sides
/// removed. The chosen blocks must reproduce the executed lines exactly.
pub fn runtime_path(trace: &Trace, blocks: &[Block]) -> Result<RuntimePath> {
    let executed: BTreeSet<Line> = trace.executed_lines.iter().copied().collect();
    let formula = all_path_formula(blocks);
    let mut chosen = Vec::new();
    let mut removed = Vec::new();

    for clause in &formula.clauses {
        if !clause.is_branch() {
            let label = clause.alternatives[0];
            let b = block(blocks, label).expect("formula refers to known blocks");
            if !b.lines.iter().all(|l| executed.contains(l)) {
                return Err(Error::InconsistentTrace {
                    msg: format!("linear block {label} was not fully executed"),
                });
            }
            chosen.push(label);
            continue;
        }

        let then_label = clause.alternatives[0];
        let else_label = clause.alternatives[1];
        let guard = block(blocks, then_label)
            .and_then(|b| b.guard_line)
            .expect("branch block carries its guard line");
        if !executed.contains(&guard) {
            removed.push(then_label);
            removed.push(else_label);
            continue;
        }
        let took_then = trace.took_then(guard).ok_or_else(|| Error::InconsistentTrace {
            msg: format!("guard at line {guard} ran but recorded no decision"),
        })?;
        let (keep, drop) = if took_then {
            (then_label, else_label)
        } else {
            (else_label, then_label)
        };
        let kept_block = block(blocks, keep).expect("formula refers to known blocks");
        if !kept_block.lines.iter().all(|l| executed.contains(l)) {
            return Err(Error::InconsistentTrace {
                msg: format!("chosen block {keep} was not fully executed"),
            });
        }
        chosen.push(keep);
        removed.push(drop);
    }

    let path = ExecutionPath { chosen };
    if path.lines(blocks) != executed {
        return Err(Error::InconsistentTrace {
            msg: "selected blocks do not cover the executed lines".to_string(),
        });
    }
    Ok(RuntimePath { path, removed })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceResult {
    pub kept: Vec<Label>,
    pub removed: Vec<Label>,
}

/// Static relevance pruning. Starting from the target variable, the closure
/// collects every variable feeding a relevant assignment, through data and
/// through the guards governing it. A clause survives when it holds a
/// relevant assignment or its guard governs one; the two arms of a
/// conditional are kept or removed together.
pub fn slice_blocks(blocks: &[Block], target: &str, deps: &LineDeps) -> Result<SliceResult> {
    if !deps.assigns.values().any(|(v, _)| v == target) {
        return Err(Error::UnknownTarget { name: target.to_string() });
    }

    let mut relevant_vars: BTreeSet<String> = BTreeSet::new();
    relevant_vars.insert(target.to_string());
    let mut relevant_lines: BTreeSet<Line> = BTreeSet::new();
    loop {
        let mut changed = false;
        for (line, (v, sources)) in &deps.assigns {
            if !relevant_vars.contains(v) {
                continue;
            }
            changed |= relevant_lines.insert(*line);
            for s in sources {
                changed |= relevant_vars.insert(s.clone());
            }
            for guard in deps.governing.get(line).into_iter().flatten() {
                for s in deps.conditions.get(guard).into_iter().flatten() {
                    changed |= relevant_vars.insert(s.clone());
                }
            }
        }
        if !changed {
            break;
        }
    }

    let governs_relevant = |guard: Line| {
        relevant_lines
            .iter()
            .any(|l| deps.governing.get(l).is_some_and(|gs| gs.contains(&guard)))
    };

    let mut kept = Vec::new();
    let mut removed = Vec::new();
    let formula = all_path_formula(blocks);
    for clause in &formula.clauses {
        let members: Vec<&Block> = clause
            .alternatives
            .iter()
            .map(|l| block(blocks, *l).expect("formula refers to known blocks"))
            .collect();
        let keep = match members[0].guard_line {
            None => members[0].lines.iter().any(|l| relevant_lines.contains(l)),
            Some(guard) => {
                governs_relevant(guard)
                    || members
                        .iter()
                        .any(|b| b.lines.iter().any(|l| *l != guard && relevant_lines.contains(l)))
            }
        };
        for b in &members {
            if keep {
                kept.push(b.label);
            } else {
                removed.push(b.label);
            }
        }
    }
    Ok(SliceResult { kept, removed })
}

/// Union of the lines of the given blocks.
pub fn lines_of(blocks: &[Block], labels: &[Label]) -> BTreeSet<Line> {
    let mut out = BTreeSet::new();
    for label in labels {
        if let Some(b) = block(blocks, *label) {
            out.extend(b.lines.iter().copied());
        }
    }
    out
}
