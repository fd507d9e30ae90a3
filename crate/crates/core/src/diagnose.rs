//! The diagnosis itself: reduce the dependence set by input purity, name the
//! possibly faulty lines, and search for single-constant repairs.

use std::collections::BTreeSet;

use crate::blocks::{
    all_path_formula, build_blocks, lines_of, runtime_path, slice_blocks, Block, Label,
    PathFormula, RuntimePath, SliceResult,
};
use crate::deps::{
    extract_line_deps, final_set, line_dependencies, set_constant, uniquify_constants,
    ConstEntry, ConstantTable, DepEntry, DepOp, DepSet, DepSource, Dependency,
};
use crate::error::{Error, Result};
use crate::interp::{execute, Env, Trace};
use crate::lang::ast::*;

/// A failing observation: this program, on these inputs, should have ended
/// with `target == desired` but ended with `observed`.
#[derive(Debug, Clone)]
pub struct FaultQuery {
    pub program: Program,
    pub inputs: Env,
    pub target: String,
    pub desired: i64,
    pub observed: i64,
    pub trace: Trace,
}

impl FaultQuery {
    /// Runs the program once to establish the observed value. The target must
    /// be assigned by some executed line.
    pub fn new(program: Program, inputs: Env, target: &str, desired: i64) -> Result<FaultQuery> {
        if !program.assigned_vars().contains(target) {
            return Err(Error::UnknownTarget { name: target.to_string() });
        }
        let trace = execute(&program, &inputs)?;
        let assigned_on_path = trace.executed_lines.iter().any(|l| {
            matches!(program.statement_at(*l), Some(Statement::Assign(a)) if a.target == target)
        });
        if !assigned_on_path {
            return Err(Error::TargetNotAssigned { name: target.to_string() });
        }
        let observed = trace.final_env[target];
        Ok(FaultQuery {
            program,
            inputs,
            target: target.to_string(),
            desired,
            observed,
            trace,
        })
    }

    /// Absolute distance between observed and desired output.
    pub fn od(&self) -> u64 {
        self.observed.abs_diff(self.desired)
    }
}

/// Everything the pruning steps establish about one executed path.
#[derive(Debug, Clone)]
pub struct PathAnalysis {
    pub blocks: Vec<Block>,
    pub formula: PathFormula,
    pub runtime: RuntimePath,
    pub slice: SliceResult,
    /// Blocks both executed and target-relevant, in path order.
    pub kept: Vec<Label>,
    pub reduced_lines: BTreeSet<Line>,
    pub reduced: Program,
    pub uniquified: Program,
    pub table: ConstantTable,
    pub records: Vec<Dependency>,
}

/// Runs the structural pipeline: partition into blocks, keep the executed
/// path, drop target-irrelevant clauses, restrict the program to what is
/// left, uniquify its constants, and extract the dependence records.
pub fn analyze_path(p: &Program, trace: &Trace, target: &str) -> Result<PathAnalysis> {
    let blocks = build_blocks(p);
    let formula = all_path_formula(&blocks);
    let runtime = runtime_path(trace, &blocks)?;
    let line_deps = line_dependencies(p);
    let slice = slice_blocks(&blocks, target, &line_deps)?;
    let relevant: BTreeSet<Label> = slice.kept.iter().copied().collect();
    let kept: Vec<Label> = runtime
        .path
        .chosen
        .iter()
        .copied()
        .filter(|l| relevant.contains(l))
        .collect();
    let reduced_lines = lines_of(&blocks, &kept);
    let reduced = p.restrict_to_lines(&reduced_lines);
    let (uniquified, table) = uniquify_constants(&reduced);
    let records = extract_line_deps(&uniquified, &reduced_lines);
    Ok(PathAnalysis {
        blocks,
        formula,
        runtime,
        slice,
        kept,
        reduced_lines,
        reduced,
        uniquified,
        table,
        records,
    })
}

pub const INPUT_PURE_REASON: &str = "error here would implicate the input, assumed correct";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovedDep {
    pub entry: DepEntry,
    pub reason: String,
}

/// Drops every pair whose source still carries an unmodified input value.
/// A variable is input-pure while it only ever received inputs or sums of
/// input-pure variables; any other assignment taints it for good, which errs
/// on the side of keeping suspects.
pub fn reduce_input_pure(
    s: &DepSet,
    p: &Program,
    inputs: &Env,
) -> (DepSet, Vec<RemovedDep>) {
    fn is_pure_expr(e: &Expr, pure: &BTreeSet<String>) -> bool {
        match e {
            Expr::Var(name) => pure.contains(name),
            Expr::BinOp { op: BinOp::Add, left, right } => {
                is_pure_expr(left, pure) && is_pure_expr(right, pure)
            }
            _ => false,
        }
    }

    fn walk(
        statements: &[Statement],
        pure: &mut BTreeSet<String>,
        evicted: &mut BTreeSet<String>,
    ) {
        for s in statements {
            match s {
                Statement::Assign(a) => {
                    if is_pure_expr(&a.expr, pure) && !evicted.contains(&a.target) {
                        pure.insert(a.target.clone());
                    } else {
                        pure.remove(&a.target);
                        evicted.insert(a.target.clone());
                    }
                }
                Statement::If(i) => {
                    walk(&i.then_body, pure, evicted);
                    walk(&i.else_body, pure, evicted);
                }
            }
        }
    }

    let mut pure: BTreeSet<String> = inputs.keys().cloned().collect();
    let mut evicted = BTreeSet::new();
    walk(&p.statements, &mut pure, &mut evicted);

    let mut surviving = Vec::new();
    let mut removed = Vec::new();
    for entry in &s.entries {
        let drop = matches!(&entry.source, DepSource::Var(name) if pure.contains(name));
        if drop {
            removed.push(RemovedDep { entry: entry.clone(), reason: INPUT_PURE_REASON.to_string() });
        } else {
            surviving.push(entry.clone());
        }
    }
    (DepSet { entries: surviving }, removed)
}

/// One attempted constant mutation and whether it reproduced the desired
/// output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repair {
    pub constant: String,
    pub line: Line,
    pub from: i64,
    pub to: i64,
    pub delta: i64,
    pub verified: bool,
}

fn eligible_constants<'a>(surviving: &DepSet, table: &'a ConstantTable) -> Vec<&'a ConstEntry> {
    let mut out: Vec<&ConstEntry> = surviving
        .entries
        .iter()
        .filter_map(|e| match (&e.source, e.op) {
            (DepSource::Const(id), Some(DepOp::Arith(BinOp::Add | BinOp::Sub))) => table.get(id),
            _ => None,
        })
        .collect();
    out.sort_by_key(|e| (e.line, e.id.clone()));
    out
}

/// Tries `value + od` and `value - od` for every surviving constant that
/// enters through `+` or `-`, re-executing the original program once per
/// attempt. Mutations are applied to the original source, not the reduced
/// form, so a verified repair is a real patch.
pub fn repair_candidates(
    q: &FaultQuery,
    surviving: &DepSet,
    table: &ConstantTable,
) -> Vec<Repair> {
    let od = q.od();
    if od == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for entry in eligible_constants(surviving, table) {
        for sign in [1i128, -1i128] {
            let to = entry.value as i128 + sign * od as i128;
            let (Ok(to), Ok(delta)) = (i64::try_from(to), i64::try_from(sign * od as i128)) else {
                continue;
            };
            let mutated = set_constant(&q.program, entry, to)
                .expect("table entries address the original program");
            let verified = execute(&mutated, &q.inputs)
                .ok()
                .and_then(|t| t.final_env.get(&q.target).copied())
                == Some(q.desired);
            out.push(Repair {
                constant: entry.id.clone(),
                line: entry.line,
                from: entry.value,
                to,
                delta,
                verified,
            });
        }
    }
    out
}

/// The verified repairs, ordered by line. Errors when no constant is even
/// eligible for mutation.
pub fn suggest_constant_repairs(
    q: &FaultQuery,
    surviving: &DepSet,
    table: &ConstantTable,
) -> Result<Vec<Repair>> {
    if eligible_constants(surviving, table).is_empty() {
        return Err(Error::NoConstantsToMutate);
    }
    let mut out: Vec<Repair> = repair_candidates(q, surviving, table)
        .into_iter()
        .filter(|r| r.verified)
        .collect();
    out.sort_by_key(|r| (r.line, r.constant.clone()));
    Ok(out)
}

/// The complete diagnosis for one failing observation.
#[derive(Debug, Clone)]
pub struct DiagnosisReport {
    pub observed: i64,
    pub desired: i64,
    pub od: u64,
    /// Possible locations of a fault: every line a surviving pair points at,
    /// plus the lines defining surviving variable sources.
    pub plofc: Vec<Line>,
    pub surviving: DepSet,
    pub removed: Vec<RemovedDep>,
    /// Verified repairs, ordered by line.
    pub repairs: Vec<Repair>,
    /// Every attempted mutation, verified or not, in attempt order.
    pub candidates: Vec<Repair>,
    pub constants: ConstantTable,
}

/// Runs the full diagnosis. Equal observed and desired values short-circuit
/// to an all-empty report: there is no fault to explain. When no constant
/// qualifies for mutation the repair list simply stays empty; the located
/// lines stand on their own.
pub fn predict_faulty_lines(q: &FaultQuery) -> Result<DiagnosisReport> {
    if q.od() == 0 {
        return Ok(DiagnosisReport {
            observed: q.observed,
            desired: q.desired,
            od: 0,
            plofc: Vec::new(),
            surviving: DepSet::default(),
            removed: Vec::new(),
            repairs: Vec::new(),
            candidates: Vec::new(),
            constants: ConstantTable::default(),
        });
    }

    let analysis = analyze_path(&q.program, &q.trace, &q.target)?;
    let full = final_set(&analysis.records);
    let (surviving, removed) = reduce_input_pure(&full, &analysis.uniquified, &q.inputs);

    let reduced_deps = line_dependencies(&analysis.reduced);
    let mut plofc: BTreeSet<Line> = BTreeSet::new();
    for entry in &surviving.entries {
        plofc.extend(entry.lines.iter().copied());
        if let DepSource::Var(name) = &entry.source {
            for (line, (target, _)) in &reduced_deps.assigns {
                if target == name {
                    plofc.insert(*line);
                }
            }
        }
    }

    let candidates = repair_candidates(q, &surviving, &analysis.table);
    let mut repairs: Vec<Repair> = candidates.iter().filter(|r| r.verified).cloned().collect();
    repairs.sort_by_key(|r| (r.line, r.constant.clone()));

    Ok(DiagnosisReport {
        observed: q.observed,
        desired: q.desired,
        od: q.od(),
        plofc: plofc.into_iter().collect(),
        surviving,
        removed,
        repairs,
        candidates,
        constants: analysis.table,
    })
}

/// A multi-observation diagnosis: one report per case plus the repairs and
/// locations consistent with every case.
#[derive(Debug, Clone)]
pub struct MultiReport {
    pub reports: Vec<DiagnosisReport>,
    /// Lines implicated by every failing case.
    pub plofc: Vec<Line>,
    /// Repairs that fix every failing case without breaking a passing one.
    pub repairs: Vec<Repair>,
}

/// Diagnoses several observations of the same program and target at once.
/// Repairs must agree across all failing cases and leave passing cases
/// passing; implicated lines are intersected over the failing cases.
pub fn diagnose_multi(
    program: &Program,
    target: &str,
    cases: &[(Env, i64)],
) -> Result<MultiReport> {
    let mut queries = Vec::new();
    let mut reports = Vec::new();
    for (inputs, desired) in cases {
        let q = FaultQuery::new(program.clone(), inputs.clone(), target, *desired)?;
        reports.push(predict_faulty_lines(&q)?);
        queries.push(q);
    }

    let failing: Vec<usize> = (0..reports.len()).filter(|i| reports[*i].od > 0).collect();
    let plofc = match failing.split_first() {
        None => Vec::new(),
        Some((first, rest)) => {
            let mut lines: BTreeSet<Line> = reports[*first].plofc.iter().copied().collect();
            for i in rest {
                let other: BTreeSet<Line> = reports[*i].plofc.iter().copied().collect();
                lines = lines.intersection(&other).copied().collect();
            }
            lines.into_iter().collect()
        }
    };

    let mut repairs = Vec::new();
    if let Some((first, rest)) = failing.split_first() {
        'candidate: for r in &reports[*first].repairs {
            for i in rest {
                if !reports[*i]
                    .repairs
                    .iter()
                    .any(|o| o.line == r.line && o.from == r.from && o.to == r.to)
                {
                    continue 'candidate;
                }
            }
            let entry = reports[*first]
                .constants
                .get(&r.constant)
                .expect("repairs name constants from their own table");
            let mutated =
                set_constant(program, entry, r.to).expect("repairs address the original program");
            for q in &queries {
                let pass = execute(&mutated, &q.inputs)
                    .ok()
                    .and_then(|t| t.final_env.get(target).copied())
                    == Some(q.desired);
                if !pass {
                    continue 'candidate;
                }
            }
            repairs.push(r.clone());
        }
    }

    Ok(MultiReport { reports, plofc, repairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::env_from;
    use crate::lang::parse;

    const EX1: &str = "\
x1 = a;
y1 = b;
if (x1 < y1)
    then z1 = x1 + 2
    else z1 = y1 + 2
z1 = z1 + y1;
if (y1 > 5)
    then z1 = z1 - 2
    else z1 = z1 + 5
z1 = z1 + 3;
";

    const EX1_BUGGY: &str = "\
x1 = a;
y1 = b;
if (x1 < y1)
    then z1 = x1 + 4
    else z1 = y1 + 2
z1 = z1 + y1;
if (y1 > 5)
    then z1 = z1 - 2
    else z1 = z1 + 5
z1 = z1 + 3;
";

    fn query<const N: usize>(
        src: &str,
        inputs: [(&str, i64); N],
        target: &str,
        desired: i64,
    ) -> FaultQuery {
        FaultQuery::new(parse(src).unwrap(), env_from(inputs), target, desired).unwrap()
    }

    #[test]
    fn buggy_constant_is_located_and_repaired() {
        let q = query(EX1_BUGGY, [("a", 3), ("b", 4)], "z1", 17);
        assert_eq!(q.observed, 19);
        assert_eq!(q.od(), 2);
        let r = predict_faulty_lines(&q).unwrap();
        assert_eq!(r.plofc, vec![4, 9, 10]);
        assert_eq!(
            r.surviving.rendered(),
            vec!["(+, (z1, c1))", "(+, (z1, c3))", "(+, (z1, c4))"]
        );
        let removed: Vec<String> = r.removed.iter().map(|d| d.entry.to_string()).collect();
        assert_eq!(
            removed,
            vec!["(=, (x1, a))", "(=, (y1, b))", "(=, (z1, x1))", "(+, (z1, y1))"]
        );
        assert!(r.removed.iter().all(|d| d.reason == INPUT_PURE_REASON));

        let tried: Vec<(&str, Line, i64, i64, bool)> = r
            .candidates
            .iter()
            .map(|c| (c.constant.as_str(), c.line, c.from, c.to, c.verified))
            .collect();
        assert_eq!(
            tried,
            vec![
                ("c1", 4, 4, 6, false),
                ("c1", 4, 4, 2, true),
                ("c3", 9, 5, 7, false),
                ("c3", 9, 5, 3, true),
                ("c4", 10, 3, 5, false),
                ("c4", 10, 3, 1, true),
            ]
        );
        let fixes: Vec<(&str, Line, i64, i64, i64)> = r
            .repairs
            .iter()
            .map(|c| (c.constant.as_str(), c.line, c.from, c.to, c.delta))
            .collect();
        assert_eq!(
            fixes,
            vec![("c1", 4, 4, 2, -2), ("c3", 9, 5, 3, -2), ("c4", 10, 3, 1, -2)]
        );
    }

    #[test]
    fn desired_above_observed_bumps_constants() {
        let q = query(EX1, [("a", 3), ("b", 4)], "z1", 19);
        let r = predict_faulty_lines(&q).unwrap();
        assert_eq!(r.od, 2);
        assert_eq!(r.plofc, vec![4, 9, 10]);
        let fixes: Vec<(&str, i64, i64)> = r
            .repairs
            .iter()
            .map(|c| (c.constant.as_str(), c.from, c.to))
            .collect();
        assert_eq!(fixes, vec![("c1", 2, 4), ("c3", 5, 7), ("c4", 3, 5)]);
    }

    #[test]
    fn matching_output_short_circuits() {
        let q = query(EX1, [("a", 3), ("b", 4)], "z1", 17);
        let r = predict_faulty_lines(&q).unwrap();
        assert_eq!(r.od, 0);
        assert!(r.plofc.is_empty());
        assert!(r.surviving.entries.is_empty());
        assert!(r.removed.is_empty());
        assert!(r.repairs.is_empty());
        assert!(r.candidates.is_empty());
    }

    #[test]
    fn unknown_target_rejected() {
        let p = parse(EX1).unwrap();
        let inputs = env_from([("a", 3), ("b", 4)]);
        let err = FaultQuery::new(p.clone(), inputs.clone(), "nope", 0).unwrap_err();
        assert_eq!(err, Error::UnknownTarget { name: "nope".into() });
        // inputs are read, never assigned, so they cannot be targets either
        let err = FaultQuery::new(p, inputs, "a", 0).unwrap_err();
        assert_eq!(err, Error::UnknownTarget { name: "a".into() });
    }

    #[test]
    fn target_untouched_on_path_rejected() {
        let p = parse("x = a;\nif (x > 0)\n    then t = 1\ny = x;\n").unwrap();
        let err = FaultQuery::new(p, env_from([("a", -1)]), "t", 1).unwrap_err();
        assert_eq!(err, Error::TargetNotAssigned { name: "t".into() });
    }

    #[test]
    fn multiplied_input_stays_suspect() {
        let q = query("w = a * 2;\nz = w + 1;\n", [("a", 3)], "z", 9);
        let r = predict_faulty_lines(&q).unwrap();
        assert_eq!(
            r.surviving.rendered(),
            vec!["(*, (w, c1))", "(+, (z, c2))", "(=, (z, w))"]
        );
        assert_eq!(r.plofc, vec![1, 2]);
        let fixes: Vec<(&str, i64, i64)> = r
            .repairs
            .iter()
            .map(|c| (c.constant.as_str(), c.from, c.to))
            .collect();
        assert_eq!(fixes, vec![("c2", 1, 3)]);
    }

    #[test]
    fn pure_chains_fall_away() {
        let q = query("v = a;\nu = v + b;\nz = u + 1;\n", [("a", 1), ("b", 2)], "z", 6);
        let r = predict_faulty_lines(&q).unwrap();
        assert_eq!(r.surviving.rendered(), vec!["(+, (z, c1))"]);
        let removed: Vec<String> = r.removed.iter().map(|d| d.entry.to_string()).collect();
        assert_eq!(
            removed,
            vec!["(=, (v, a))", "(+, (u, b))", "(=, (u, v))", "(=, (z, u))"]
        );
        assert_eq!(r.plofc, vec![3]);
    }

    #[test]
    fn reassigned_copy_stays_suspect() {
        // v once held a computed value, so its later plain copy of the input
        // does not launder it
        let q = query("v = a * 2;\nv = a;\nz = v + 1;\n", [("a", 3)], "z", 6);
        let r = predict_faulty_lines(&q).unwrap();
        assert!(r.surviving.contains_pair("z", "v"));
        assert!(!r.surviving.contains_pair("v", "a"));
        assert_eq!(r.plofc, vec![1, 2, 3]);
    }

    #[test]
    fn no_eligible_constant_is_an_error() {
        let q = query("z = a + b;\n", [("a", 1), ("b", 2)], "z", 5);
        let r = predict_faulty_lines(&q).unwrap();
        assert!(r.candidates.is_empty());
        let err = suggest_constant_repairs(&q, &r.surviving, &r.constants).unwrap_err();
        assert_eq!(err, Error::NoConstantsToMutate);
    }

    #[test]
    fn multiple_observations_pin_the_fault() {
        let p = parse(EX1_BUGGY).unwrap();
        let cases = vec![
            (env_from([("a", 3), ("b", 4)]), 17),
            (env_from([("a", 5), ("b", 9)]), 17),
            (env_from([("a", 9), ("b", 7)]), 17),
        ];
        let m = diagnose_multi(&p, "z1", &cases).unwrap();
        assert_eq!(m.reports.len(), 3);
        assert_eq!(m.reports[0].od, 2);
        assert_eq!(m.reports[1].od, 2);
        assert_eq!(m.reports[2].od, 0);
        assert_eq!(m.reports[0].plofc, vec![4, 9, 10]);
        assert_eq!(m.reports[1].plofc, vec![4, 8, 10]);
        assert_eq!(m.plofc, vec![4, 10]);
        // only the line 4 patch survives every observation
        let fixes: Vec<(&str, Line, i64, i64)> = m
            .repairs
            .iter()
            .map(|c| (c.constant.as_str(), c.line, c.from, c.to))
            .collect();
        assert_eq!(fixes, vec![("c1", 4, 4, 2)]);
    }
}
