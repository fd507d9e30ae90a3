//! DOT renderings of the three block graphs: the full clause chain, the
//! runtime pruning, and the reduced path annotated with its dependences.

use crate::blocks::{all_path_formula, Block, ExecutionPath, Label};
use crate::deps::Dependency;

fn fmt_lines(lines: &[u32]) -> String {
    let parts: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
    parts.join(", ")
}

fn chain_edges(chain: &[Vec<Label>]) -> String {
    let mut out = String::new();
    for pair in chain.windows(2) {
        for from in &pair[0] {
            for to in &pair[1] {
                out.push_str(&format!("  \"{from}\" -> \"{to}\";\n"));
            }
        }
    }
    out
}

fn clause_chain(blocks: &[Block]) -> Vec<Vec<Label>> {
    all_path_formula(blocks)
        .clauses
        .iter()
        .map(|c| c.alternatives.clone())
        .collect()
}

/// Graph 1: every block, with each clause fanning out to the next.
pub fn graph_all_paths(blocks: &[Block]) -> String {
    let mut out = String::from("digraph all_paths {\n  rankdir=TB;\n  node [shape=box];\n");
    for b in blocks {
        out.push_str(&format!(
            "  \"{}\" [label=\"{}\\nlines: {}\"];\n",
            b.label,
            b.label,
            fmt_lines(&b.lines)
        ));
    }
    out.push_str(&chain_edges(&clause_chain(blocks)));
    out.push_str("}\n");
    out
}

/// Graph 2: the same chain with the executed path in green and every pruned
/// block in red.
pub fn graph_runtime(blocks: &[Block], path: &ExecutionPath) -> String {
    let mut out = String::from("digraph runtime_path {\n  rankdir=TB;\n  node [shape=box];\n");
    for b in blocks {
        let color = if path.contains(b.label) { "green" } else { "red" };
        out.push_str(&format!(
            "  \"{}\" [label=\"{}\\nlines: {}\", color={}];\n",
            b.label,
            b.label,
            fmt_lines(&b.lines),
            color
        ));
    }
    out.push_str(&chain_edges(&clause_chain(blocks)));
    out.push_str("}\n");
    out
}

/// Graph 3: only the reduced path, each block annotated with the dependence
/// records of its lines. Excluded records keep their star.
pub fn graph_dependencies(
    blocks: &[Block],
    kept: &[Label],
    records: &[Dependency],
) -> String {
    let mut out = String::from("digraph dependencies {\n  rankdir=TB;\n  node [shape=box];\n");
    for label in kept {
        let Some(b) = crate::blocks::block(blocks, *label) else { continue };
        let mut text = format!("{}\\nlines: {}", b.label, fmt_lines(&b.lines));
        for r in records {
            if b.lines.contains(&r.line) {
                text.push_str(&format!("\\n{r}"));
            }
        }
        out.push_str(&format!("  \"{}\" [label=\"{}\"];\n", b.label, text));
    }
    let chain: Vec<Vec<Label>> = kept.iter().map(|l| vec![*l]).collect();
    out.push_str(&chain_edges(&chain));
    out.push_str("}\n");
    out
}
