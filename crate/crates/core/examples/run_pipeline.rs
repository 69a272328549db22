//! The whole chain from a scene file, with pre-rendered conditions standing
//! in for Blender.
//!
//! cargo run --release --example run_pipeline -- examples/scenes/basketball.scene tests/fixtures/drop8 out/run

use std::path::PathBuf;

use motionforge::pipeline::{Context, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let scene = args.next().unwrap_or_else(|| "examples/scenes/basketball.scene".into());
    let conditions = PathBuf::from(args.next().unwrap_or_else(|| "tests/fixtures/drop8".into()));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "run".into()));

    let mut config = RunConfig::default();
    config.synthesis.steps = 10;
    let report = Context::new(config, false).run(&scene, Some(&conditions), Some(&out))?;
    for line in report.lines {
        println!("{line}");
    }
    Ok(())
}
