//! Run the static linter over a Python file, as the render stage does
//! before handing it to Blender.
//!
//! cargo run --example lint_script -- tests/adversarial/process_spawn.py

use std::process::ExitCode;

use motionforge::codegen::{lint_script, FunctionManifest, ScriptText};

fn main() -> ExitCode {
    let path = std::env::args().nth(1).unwrap_or_else(|| "tests/golden/basketball.py".into());
    let body = match std::fs::read_to_string(&path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("{path}: {e}");
            return ExitCode::FAILURE;
        }
    };
    let report = lint_script(&ScriptText::llm(body), &FunctionManifest::builtin());
    println!("{path}: {report}");
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
