//! JSON and plain-text renderings of traces, blocks, dependence sets, and
//! diagnosis reports. JSON objects serialize with sorted keys, so equal
//! inputs produce byte-identical output.

use serde_json::{json, Value};

use crate::blocks::{Block, BlockKind, ExecutionPath, PathFormula};
use crate::deps::{ConstantTable, DepEntry, DepSet};
use crate::diagnose::{DiagnosisReport, RemovedDep};
use crate::error::{Error, Result};
use crate::interp::{Env, Trace};

pub fn trace_json(t: &Trace) -> Value {
    let decisions: Vec<Value> = t
        .branch_decisions
        .iter()
        .map(|(line, took_then)| json!({ "line": line, "took_then": took_then }))
        .collect();
    json!({
        "executed": t.executed_lines,
        "decisions": decisions,
        "final": t.final_env,
    })
}

pub fn trace_text(t: &Trace) -> String {
    let mut out = String::new();
    let lines: Vec<String> = t.executed_lines.iter().map(|l| l.to_string()).collect();
    out.push_str(&format!("executed: {}\n", lines.join(" ")));
    for (line, took_then) in &t.branch_decisions {
        let arm = if *took_then { "then" } else { "else" };
        out.push_str(&format!("decision line {line}: {arm}\n"));
    }
    out.push_str("final:\n");
    for (name, value) in &t.final_env {
        out.push_str(&format!("{name} = {value}\n"));
    }
    out
}

fn kind_str(kind: BlockKind) -> &'static str {
    match kind {
        BlockKind::Linear => "linear",
        BlockKind::Then => "then",
        BlockKind::Else => "else",
    }
}

pub fn blocks_json(blocks: &[Block], formula: &PathFormula, paths: &[ExecutionPath]) -> Value {
    let block_values: Vec<Value> = blocks
        .iter()
        .map(|b| {
            json!({
                "label": b.label.to_string(),
                "kind": kind_str(b.kind),
                "lines": b.lines,
                "guard": b.guard_line,
            })
        })
        .collect();
    let path_values: Vec<Value> = paths
        .iter()
        .map(|p| Value::from(p.chosen.iter().map(|l| l.to_string()).collect::<Vec<_>>()))
        .collect();
    json!({
        "blocks": block_values,
        "formula": formula.to_string(),
        "paths": path_values,
    })
}

pub fn blocks_text(blocks: &[Block], formula: &PathFormula, paths: &[ExecutionPath]) -> String {
    let mut out = String::from("blocks:\n");
    for b in blocks {
        let lines: Vec<String> = b.lines.iter().map(|l| l.to_string()).collect();
        out.push_str(&format!("  {:4} lines {}\n", b.label.to_string(), lines.join(", ")));
    }
    out.push_str(&format!("formula: {formula}\n"));
    out.push_str("paths:\n");
    for (i, p) in paths.iter().enumerate() {
        out.push_str(&format!("  ({}) {}\n", i + 1, p));
    }
    out
}

fn dep_entry_json(e: &DepEntry) -> Value {
    json!({
        "op": e.op.map(|o| o.symbol()),
        "target": e.target,
        "source": e.source.name(),
        "lines": e.lines,
    })
}

fn dep_set_json(s: &DepSet) -> Value {
    Value::from(s.entries.iter().map(dep_entry_json).collect::<Vec<_>>())
}

fn constants_json(table: &ConstantTable) -> Value {
    let entries: Vec<Value> = table
        .entries
        .iter()
        .map(|e| {
            json!({
                "id": e.id,
                "value": e.value,
                "line": e.line,
                "occurrence": e.occurrence,
                "context": e.context.as_str(),
            })
        })
        .collect();
    Value::from(entries)
}

pub fn deps_json(table: &ConstantTable, s1: &DepSet, s2: &DepSet, fin: &DepSet) -> Value {
    json!({
        "constants": constants_json(table),
        "set1": dep_set_json(s1),
        "set2": dep_set_json(s2),
        "final": dep_set_json(fin),
    })
}

fn dep_set_text(s: &DepSet) -> String {
    let mut out = String::new();
    for e in &s.entries {
        let lines: Vec<String> = e.lines.iter().map(|l| l.to_string()).collect();
        out.push_str(&format!("  {}  lines {}\n", e, lines.join(", ")));
    }
    out
}

pub fn deps_text(table: &ConstantTable, s1: &DepSet, s2: &DepSet, fin: &DepSet) -> String {
    let mut out = String::from("constants:\n");
    for e in &table.entries {
        out.push_str(&format!(
            "  {} = {}  (line {}, {})\n",
            e.id,
            e.value,
            e.line,
            e.context.as_str()
        ));
    }
    out.push_str("set 1:\n");
    out.push_str(&dep_set_text(s1));
    out.push_str("set 2:\n");
    out.push_str(&dep_set_text(s2));
    out.push_str("final set:\n");
    out.push_str(&dep_set_text(fin));
    out
}

fn removed_json(r: &RemovedDep) -> Value {
    let mut v = dep_entry_json(&r.entry);
    v["reason"] = Value::from(r.reason.as_str());
    v
}

pub fn diagnosis_json(r: &DiagnosisReport) -> Value {
    let repairs: Vec<Value> = r
        .repairs
        .iter()
        .map(|rep| {
            json!({
                "constant": rep.constant,
                "line": rep.line,
                "from": rep.from,
                "to": rep.to,
                "delta": rep.delta,
            })
        })
        .collect();
    json!({
        "observed": r.observed,
        "desired": r.desired,
        "od": r.od,
        "plofc": r.plofc,
        "surviving": dep_set_json(&r.surviving),
        "removed": Value::from(r.removed.iter().map(removed_json).collect::<Vec<_>>()),
        "repairs": repairs,
    })
}

pub fn diagnosis_text(r: &DiagnosisReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("observed: {}\n", r.observed));
    out.push_str(&format!("desired: {}\n", r.desired));
    out.push_str(&format!("od: {}\n", r.od));
    let plofc: Vec<String> = r.plofc.iter().map(|l| l.to_string()).collect();
    out.push_str(&format!("plofc: {}\n", plofc.join(" ")));
    out.push_str("surviving:\n");
    out.push_str(&dep_set_text(&r.surviving));
    out.push_str("removed:\n");
    for rem in &r.removed {
        let lines: Vec<String> = rem.entry.lines.iter().map(|l| l.to_string()).collect();
        out.push_str(&format!(
            "  {}  lines {}  [{}]\n",
            rem.entry,
            lines.join(", "),
            rem.reason
        ));
    }
    out.push_str("repairs:\n");
    for rep in &r.repairs {
        out.push_str(&format!(
            "  {}: {} -> {} (delta {}) line {}\n",
            rep.constant, rep.from, rep.to, rep.delta, rep.line
        ));
    }
    out
}

/// Parses inline input bindings of the form `a=3,b=4`. Whitespace around
/// names, values, and separators is ignored; the empty string binds nothing.
pub fn parse_inputs_inline(text: &str) -> Result<Env> {
    let mut env = Env::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, value) = part.split_once('=').ok_or_else(|| Error::InvalidInputs {
            msg: format!("`{part}` is not of the form name=value"),
        })?;
        let value: i64 = value.trim().parse().map_err(|_| Error::InvalidInputs {
            msg: format!("`{}` is not an integer", value.trim()),
        })?;
        env.insert(name.trim().to_string(), value);
    }
    Ok(env)
}

/// Parses a JSON object of input bindings, e.g. `{"a": 3, "b": 4}`.
pub fn parse_inputs_json(text: &str) -> Result<Env> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::InvalidInputs {
        msg: format!("invalid JSON: {e}"),
    })?;
    let obj = value.as_object().ok_or_else(|| Error::InvalidInputs {
        msg: "expected a JSON object of name/value pairs".to_string(),
    })?;
    let mut env = Env::new();
    for (name, v) in obj {
        let value = v.as_i64().ok_or_else(|| Error::InvalidInputs {
            msg: format!("`{name}` is not a 64-bit integer"),
        })?;
        env.insert(name.clone(), value);
    }
    Ok(env)
}
