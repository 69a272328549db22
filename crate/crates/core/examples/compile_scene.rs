//! Compile a `.scene` file into a Blender script and lint it.
//!
//! cargo run --example compile_scene -- examples/scenes/basketball.scene

use motionforge::assets::AssetCatalog;
use motionforge::codegen::{emit_script, lint_script, FunctionManifest};
use motionforge::scene::{canonical_digest, parse_scene};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "examples/scenes/basketball.scene".into());
    let source = std::fs::read_to_string(&path)?;
    let spec = parse_scene(&source)?;
    let manifest = FunctionManifest::builtin();
    let script = emit_script(&spec, &manifest, &AssetCatalog::builtin())?;
    let report = lint_script(&script, &manifest);
    eprintln!("digest {}", canonical_digest(&spec));
    eprintln!("lint {report}");
    print!("{}", script.body);
    Ok(())
}
