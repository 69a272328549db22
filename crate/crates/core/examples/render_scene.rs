//! Render edge and depth conditions for a scene with a local Blender,
//! reusing cached frames when the same scene was rendered before.
//!
//! cargo run --example render_scene -- examples/scenes/basketball.scene out/conditions [BLENDER] [LIBRARY_DIR]

use std::path::PathBuf;

use motionforge::assets::AssetCatalog;
use motionforge::codegen::{emit_script, FunctionManifest};
use motionforge::render::{ContentCache, Renderer};
use motionforge::scene::parse_scene;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let scene = args.next().unwrap_or_else(|| "examples/scenes/basketball.scene".into());
    let out = PathBuf::from(args.next().unwrap_or_else(|| "conditions".into()));
    let blender = args.next().unwrap_or_else(|| "blender".into());

    let manifest = FunctionManifest::builtin();
    let spec = parse_scene(&std::fs::read_to_string(&scene)?)?;
    let script = emit_script(&spec, &manifest, &AssetCatalog::builtin())?;
    let mut renderer = Renderer::new(blender);
    if let Some(lib) = args.next() {
        renderer = renderer.library_dir(lib);
    }
    let cache = ContentCache::new(std::env::temp_dir().join("motionforge-cache"));
    let (seq, status) = renderer.render_cached(&script, &manifest, &out, Some(&cache))?;
    println!("{} frames at {:?} ({status:?})", seq.frame_count(), seq.resolution());
    Ok(())
}
