//! The release gate. One test per numbered criterion; each prints a PASS line
//! with the pinned tolerance it was held to.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use plofc_core::blocks::{
    all_path_formula, build_blocks, enumerate_paths, lines_of, runtime_path, DEFAULT_PATH_CAP,
};
use plofc_core::deps::{final_set, set1, set2, set_constant, DepOp, DepSource};
use plofc_core::diagnose::{
    analyze_path, predict_faulty_lines, reduce_input_pure, FaultQuery, INPUT_PURE_REASON,
};
use plofc_core::gen::{random_inputs, random_program, seed_constant_fault, GenConfig, TARGET};
use plofc_core::interp::{env_from, execute, Env};
use plofc_core::lang::{parse, BinOp, Expr, Line, Program, Statement};

const EX1: &str = include_str!("../../../programs/ex1.mimp");
const EX1_BUGGY: &str = include_str!("../../../programs/ex1_buggy.mimp");

const EXEC_BUDGET: Duration = Duration::from_millis(1);
const REPAIR_BUDGET: Duration = Duration::from_millis(10);
const CORPUS_BUDGET: Duration = Duration::from_secs(60);
const CORPUS_SIZE: usize = 500;

fn ex1() -> Program {
    parse(EX1).unwrap()
}

fn buggy() -> Program {
    parse(EX1_BUGGY).unwrap()
}

fn ab34() -> Env {
    env_from([("a", 3), ("b", 4)])
}

#[test]
fn criterion_1_reference_execution() {
    let started = Instant::now();
    let good = execute(&ex1(), &ab34()).unwrap();
    let good_time = started.elapsed();
    assert_eq!(good.final_env["z1"], 17);

    let started = Instant::now();
    let bad = execute(&buggy(), &ab34()).unwrap();
    let bad_time = started.elapsed();
    assert_eq!(bad.final_env["z1"], 19);

    assert!(good_time < EXEC_BUDGET, "reference run took {good_time:?}");
    assert!(bad_time < EXEC_BUDGET, "mutant run took {bad_time:?}");
    println!(
        "PASS: criterion 1 — z1 = 17 on the reference, 19 on the line-4 mutant, \
         each under {EXEC_BUDGET:?}"
    );
}

#[test]
fn criterion_2_block_partition() {
    let blocks = build_blocks(&ex1());
    let got: Vec<(String, Vec<Line>)> = blocks
        .iter()
        .map(|b| (b.label.to_string(), b.lines.clone()))
        .collect();
    let want: Vec<(String, Vec<Line>)> = vec![
        ("A".into(), vec![1, 2]),
        ("B".into(), vec![3, 4]),
        ("¬B".into(), vec![3, 5]),
        ("C".into(), vec![6]),
        ("D".into(), vec![7, 8]),
        ("¬D".into(), vec![7, 9]),
        ("E".into(), vec![10]),
    ];
    assert_eq!(got, want);
    println!("PASS: criterion 2 — 7 blocks, condition lines 3 and 7 shared by both arms");
}

#[test]
fn criterion_3_path_enumeration() {
    let blocks = build_blocks(&ex1());
    let formula = all_path_formula(&blocks);
    assert_eq!(formula.to_string(), "A ∧ (B ∨ ¬B) ∧ C ∧ (D ∨ ¬D) ∧ E");
    let paths = enumerate_paths(&formula, DEFAULT_PATH_CAP).unwrap();
    let shown: Vec<String> = paths.iter().map(|p| p.to_string()).collect();
    assert_eq!(
        shown,
        [
            "A ∧ B ∧ C ∧ D ∧ E",
            "A ∧ B ∧ C ∧ ¬D ∧ E",
            "A ∧ ¬B ∧ C ∧ D ∧ E",
            "A ∧ ¬B ∧ C ∧ ¬D ∧ E",
        ]
    );
    println!("PASS: criterion 3 — 4 paths enumerated in then-first order");
}

#[test]
fn criterion_4_runtime_pruning() {
    let p = ex1();
    let trace = execute(&p, &ab34()).unwrap();
    let rp = runtime_path(&trace, &build_blocks(&p)).unwrap();
    assert_eq!(rp.path.to_string(), "A ∧ B ∧ C ∧ ¬D ∧ E");
    let removed: Vec<String> = rp.removed.iter().map(|l| l.to_string()).collect();
    assert_eq!(removed, ["¬B", "D"]);
    println!("PASS: criterion 4 — runtime path A ∧ B ∧ C ∧ ¬D ∧ E, removed {{¬B, D}}");
}

#[test]
fn criterion_5_dependence_sets() {
    let p = ex1();
    let trace = execute(&p, &ab34()).unwrap();
    let analysis = analyze_path(&p, &trace, "z1").unwrap();
    assert_eq!(
        set1(&analysis.records).rendered(),
        ["(x1, a)", "(y1, b)", "(z1, x1)", "(z1, y1)", "(z1, z1)"]
    );
    assert_eq!(
        set2(&analysis.records).rendered(),
        [
            "(x1, a)",
            "(y1, b)",
            "(z1, c1)",
            "(z1, x1)",
            "(z1, y1)",
            "(z1, z1)",
            "(z1, c3)",
            "(z1, c4)",
        ]
    );
    assert_eq!(
        final_set(&analysis.records).rendered(),
        [
            "(=, (x1, a))",
            "(=, (y1, b))",
            "(+, (z1, c1))",
            "(=, (z1, x1))",
            "(+, (z1, y1))",
            "(+, (z1, c3))",
            "(+, (z1, c4))",
        ]
    );
    println!("PASS: criterion 5 — dependence sets of 5, 8, and 7 entries, canonical order");
}

#[test]
fn criterion_6_input_purity_reduction() {
    let p = ex1();
    let inputs = ab34();
    let trace = execute(&p, &inputs).unwrap();
    let analysis = analyze_path(&p, &trace, "z1").unwrap();
    let full = final_set(&analysis.records);
    let (surviving, removed) = reduce_input_pure(&full, &analysis.uniquified, &inputs);
    assert_eq!(
        surviving.rendered(),
        ["(+, (z1, c1))", "(+, (z1, c3))", "(+, (z1, c4))"]
    );
    let dropped: Vec<String> = removed.iter().map(|d| d.entry.to_string()).collect();
    assert_eq!(
        dropped,
        ["(=, (x1, a))", "(=, (y1, b))", "(=, (z1, x1))", "(+, (z1, y1))"]
    );
    assert!(removed.iter().all(|d| d.reason == INPUT_PURE_REASON));
    println!("PASS: criterion 6 — 3 constant pairs survive, 4 input-pure pairs removed");
}

#[test]
fn criterion_7_repair_search() {
    let q = FaultQuery::new(buggy(), ab34(), "z1", 17).unwrap();
    assert_eq!(q.od(), 2);

    let started = Instant::now();
    let report = predict_faulty_lines(&q).unwrap();
    let elapsed = started.elapsed();

    assert_eq!(report.candidates.len(), 6, "repair budget is two runs per constant");
    let fixes: Vec<(String, i64, i64, i64)> = report
        .repairs
        .iter()
        .map(|r| (r.constant.clone(), r.from, r.to, r.delta))
        .collect();
    let want: Vec<(String, i64, i64, i64)> = vec![
        ("c1".into(), 4, 2, -2),
        ("c3".into(), 5, 3, -2),
        ("c4".into(), 3, 1, -2),
    ];
    assert_eq!(fixes, want);

    // replay every reported repair from scratch
    for r in &report.repairs {
        let entry = report.constants.get(&r.constant).unwrap();
        let patched = set_constant(&q.program, entry, r.to).unwrap();
        let rerun = execute(&patched, &q.inputs).unwrap();
        assert_eq!(rerun.final_env["z1"], 17, "{} did not restore the output", r.constant);
    }

    assert!(elapsed < REPAIR_BUDGET, "diagnosis took {elapsed:?}");
    println!(
        "PASS: criterion 7 — 6 candidate executions, repairs c1−2 c3−2 c4−2 \
         all re-execute to 17, under {REPAIR_BUDGET:?}"
    );
}

fn count_ifs(statements: &[Statement]) -> usize {
    statements
        .iter()
        .map(|s| match s {
            Statement::If(i) => 1 + count_ifs(&i.then_body) + count_ifs(&i.else_body),
            Statement::Assign(_) => 0,
        })
        .sum()
}

/// Constant leaves of one statement, in replacement-occurrence order.
fn const_values(s: &Statement) -> Vec<i64> {
    let exprs: Vec<&Expr> = match s {
        Statement::Assign(a) => vec![&a.expr],
        Statement::If(i) => vec![&i.cond.left, &i.cond.right],
    };
    exprs
        .into_iter()
        .flat_map(|e| e.leaves())
        .filter_map(|leaf| match leaf {
            Expr::Const(v) => Some(*v),
            _ => None,
        })
        .collect()
}

#[test]
fn criterion_8_seeded_fault_corpus() {
    let started = Instant::now();
    let cfg = GenConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let mut accepted = 0usize;
    let mut attempts = 0usize;
    let mut oracle_runs = 0usize;
    let mut oracle_skips = 0usize;
    let mut exact_od_reverts = 0usize;

    while accepted < CORPUS_SIZE {
        attempts += 1;
        assert!(attempts < 20_000, "generator kept producing unusable samples");

        let p = random_program(&mut rng, &cfg);
        if p.statement_count() > 30 || count_ifs(&p.statements) > 4 {
            continue;
        }
        let Some(fault) = seed_constant_fault(&mut rng, &p) else {
            continue;
        };
        let inputs = random_inputs(&mut rng, &p, -9, 9);
        let Ok(good) = execute(&p, &inputs) else {
            continue;
        };
        let desired = good.final_env[TARGET];
        let Ok(bad) = execute(&fault.program, &inputs) else {
            continue;
        };
        if bad.final_env[TARGET] == desired {
            continue; // fault not triggered on these inputs
        }
        accepted += 1;

        let q = FaultQuery::new(fault.program.clone(), inputs.clone(), TARGET, desired).unwrap();
        let report = predict_faulty_lines(&q).unwrap();
        let analysis = analyze_path(&q.program, &q.trace, TARGET).unwrap();

        // (a) nudging any constant inside a statically sliced-away block
        // must leave the target untouched
        let removed_lines = lines_of(&analysis.blocks, &analysis.slice.removed);
        for line in &removed_lines {
            let stmt = q.program.statement_at(*line).unwrap();
            for (occ, value) in const_values(stmt).into_iter().enumerate() {
                let mutated = q
                    .program
                    .replace_const_at(*line, occ as u32, value + 1)
                    .unwrap();
                oracle_runs += 1;
                match execute(&mutated, &inputs) {
                    Ok(rerun) => assert_eq!(
                        rerun.final_env[TARGET], q.observed,
                        "sliced-away line {line} moved the target"
                    ),
                    Err(_) => oracle_skips += 1,
                }
            }
        }

        // (b) the runtime path covers the executed lines exactly
        let executed: BTreeSet<Line> = q.trace.executed_lines.iter().copied().collect();
        assert_eq!(analysis.runtime.path.lines(&analysis.blocks), executed);

        // (c) the planted constant's dependence survives the reduction
        let seeded = analysis
            .table
            .find_at(fault.line, fault.occurrence)
            .expect("the faulty line stays in the reduced program");
        assert!(
            report
                .surviving
                .entries
                .iter()
                .any(|e| e.source == DepSource::Const(seeded.id.clone())),
            "seeded constant {} was reduced away",
            seeded.id
        );

        // (d) a perturbation of exactly the output difference is found
        if fault.delta.unsigned_abs() == report.od {
            exact_od_reverts += 1;
            assert!(
                report
                    .repairs
                    .iter()
                    .any(|r| r.constant == seeded.id && r.to == fault.original),
                "reverting {} to {} was not reported",
                seeded.id,
                fault.original
            );
        }

        // (e) the search budget is exactly two executions per eligible constant
        let eligible = report
            .surviving
            .entries
            .iter()
            .filter(|e| {
                matches!(e.source, DepSource::Const(_))
                    && matches!(e.op, Some(DepOp::Arith(BinOp::Add | BinOp::Sub)))
            })
            .count();
        assert!(eligible >= 1);
        assert_eq!(report.candidates.len(), 2 * eligible);
    }

    let elapsed = started.elapsed();
    assert!(elapsed < CORPUS_BUDGET, "corpus took {elapsed:?}");
    assert!(oracle_skips == 0, "{oracle_skips} slice-oracle runs failed to execute");
    assert!(
        exact_od_reverts >= 25,
        "only {exact_od_reverts} samples exercised the exact-OD revert"
    );
    println!(
        "PASS: criterion 8 — {CORPUS_SIZE} seeded faults ({attempts} draws): slices sound \
         over {oracle_runs} mutations, paths exact, seeded constants survived, \
         {exact_od_reverts} exact-OD reverts found, budget 2d throughout, in {elapsed:.2?}"
    );
}

#[test]
fn criterion_9_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_plofc");
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../programs");
    let ex1 = format!("{dir}/ex1.mimp");
    let ex1_buggy = format!("{dir}/ex1_buggy.mimp");

    let invocations: Vec<(Vec<&str>, i32)> = vec![
        (
            vec![
                "diagnose", "--program", &ex1_buggy, "--inputs", "a=3,b=4", "--target", "z1",
                "--expect", "17", "--format", "json",
            ],
            1,
        ),
        (
            vec![
                "deps", "--program", &ex1, "--inputs", "a=3,b=4", "--target", "z1", "--format",
                "json",
            ],
            0,
        ),
        (vec!["blocks", "--program", &ex1, "--format", "json"], 0),
        (
            vec!["trace", "--program", &ex1, "--inputs", "a=3,b=4", "--format", "json"],
            0,
        ),
    ];

    for (args, want_code) in &invocations {
        let run = || {
            Command::new(bin)
                .args(args)
                .output()
                .expect("binary runs")
        };
        let first = run();
        let second = run();
        assert_eq!(first.status.code(), Some(*want_code), "{args:?}");
        assert!(!first.stdout.is_empty(), "{args:?} printed nothing");
        assert_eq!(first.stdout, second.stdout, "{args:?} output varied between runs");
    }
    println!("PASS: criterion 9 — 4 JSON invocations byte-identical across repeated runs");
}
