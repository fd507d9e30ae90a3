use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use plofc_core::blocks::{all_path_formula, build_blocks, enumerate_paths, DEFAULT_PATH_CAP};
use plofc_core::deps::{final_set, set1, set2};
use plofc_core::diagnose::{analyze_path, predict_faulty_lines, FaultQuery};
use plofc_core::dot::{graph_all_paths, graph_dependencies, graph_runtime};
use plofc_core::interp::{execute, Env};
use plofc_core::lang::parser::parse;
use plofc_core::lang::Program;
use plofc_core::report;

/// Localize faulty lines and suggest constant repairs for MiniImp programs.
#[derive(Parser)]
#[command(name = "plofc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full diagnosis: faulty lines, dependence sets, repairs.
    Diagnose(DiagnoseArgs),
    /// Execute the program and print its trace.
    Trace(TraceArgs),
    /// Print the block partition, the all-path formula, and every path.
    Blocks(BlocksArgs),
    /// Print the dependence sets along the executed path.
    Deps(DepsArgs),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct InputArgs {
    /// Inline input bindings, e.g. `a=3,b=4`.
    #[arg(long, value_name = "BINDINGS")]
    inputs: Option<String>,
    /// JSON file with input bindings, e.g. `{"a": 3, "b": 4}`. Inline
    /// bindings win on conflict.
    #[arg(long, value_name = "FILE")]
    inputs_file: Option<PathBuf>,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Program source file.
    #[arg(long, value_name = "FILE")]
    program: PathBuf,
    #[command(flatten)]
    inputs: InputArgs,
    /// Output variable to diagnose.
    #[arg(long, value_name = "VAR")]
    target: String,
    /// The value the target should have ended with.
    #[arg(long, value_name = "INT")]
    expect: i64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Write graph1.dot, graph2.dot, and graph3.dot into this directory.
    #[arg(long, value_name = "DIR")]
    emit_dot: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long, value_name = "FILE")]
    program: PathBuf,
    #[command(flatten)]
    inputs: InputArgs,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct BlocksArgs {
    #[arg(long, value_name = "FILE")]
    program: PathBuf,
    /// Refuse to enumerate paths past this many branch clauses.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_PATH_CAP)]
    path_cap: u32,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct DepsArgs {
    #[arg(long, value_name = "FILE")]
    program: PathBuf,
    #[command(flatten)]
    inputs: InputArgs,
    /// Output variable the dependences lead to.
    #[arg(long, value_name = "VAR")]
    target: String,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_program(path: &Path) -> Result<Program, String> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&src).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_inputs(args: &InputArgs) -> Result<Env, String> {
    let mut env = Env::new();
    if let Some(path) = &args.inputs_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        env = report::parse_inputs_json(&text).map_err(|e| e.to_string())?;
    }
    if let Some(inline) = &args.inputs {
        env.extend(report::parse_inputs_inline(inline).map_err(|e| e.to_string())?);
    }
    Ok(env)
}

fn print_value(format: Format, json: serde_json::Value, text: String) {
    use std::io::{ErrorKind, Write};
    let mut stdout = std::io::stdout().lock();
    let result = match format {
        Format::Json => writeln!(
            stdout,
            "{}",
            serde_json::to_string_pretty(&json).expect("reports serialize")
        ),
        Format::Text => write!(stdout, "{text}"),
    };
    if let Err(e) = result {
        // A downstream reader like `head` closing the pipe is not a failure.
        if e.kind() == ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Diagnose(args) => {
            let program = load_program(&args.program)?;
            let inputs = load_inputs(&args.inputs)?;
            let q = FaultQuery::new(program.clone(), inputs, &args.target, args.expect)
                .map_err(|e| e.to_string())?;
            let rep = predict_faulty_lines(&q).map_err(|e| e.to_string())?;
            if let Some(dir) = &args.emit_dot {
                let analysis =
                    analyze_path(&program, &q.trace, &args.target).map_err(|e| e.to_string())?;
                std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
                let graphs = [
                    ("graph1.dot", graph_all_paths(&analysis.blocks)),
                    ("graph2.dot", graph_runtime(&analysis.blocks, &analysis.runtime.path)),
                    (
                        "graph3.dot",
                        graph_dependencies(&analysis.blocks, &analysis.kept, &analysis.records),
                    ),
                ];
                for (name, content) in graphs {
                    let path = dir.join(name);
                    std::fs::write(&path, content)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                }
            }
            print_value(
                args.format,
                report::diagnosis_json(&rep),
                report::diagnosis_text(&rep),
            );
            Ok(ExitCode::from(u8::from(rep.od > 0)))
        }
        Command::Trace(args) => {
            let program = load_program(&args.program)?;
            let inputs = load_inputs(&args.inputs)?;
            let trace = execute(&program, &inputs).map_err(|e| e.to_string())?;
            print_value(args.format, report::trace_json(&trace), report::trace_text(&trace));
            Ok(ExitCode::SUCCESS)
        }
        Command::Blocks(args) => {
            let program = load_program(&args.program)?;
            let blocks = build_blocks(&program);
            let formula = all_path_formula(&blocks);
            let paths = enumerate_paths(&formula, args.path_cap).map_err(|e| e.to_string())?;
            print_value(
                args.format,
                report::blocks_json(&blocks, &formula, &paths),
                report::blocks_text(&blocks, &formula, &paths),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Deps(args) => {
            let program = load_program(&args.program)?;
            let inputs = load_inputs(&args.inputs)?;
            let trace = execute(&program, &inputs).map_err(|e| e.to_string())?;
            let analysis =
                analyze_path(&program, &trace, &args.target).map_err(|e| e.to_string())?;
            let records = &analysis.records;
            print_value(
                args.format,
                report::deps_json(&analysis.table, &set1(records), &set2(records), &final_set(records)),
                report::deps_text(&analysis.table, &set1(records), &set2(records), &final_set(records)),
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
