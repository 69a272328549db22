use std::fs;
use std::path::PathBuf;

use motionforge::assets::AssetCatalog;
use motionforge::codegen::{emit_script, lint_script, FindingKind, FunctionManifest, ScriptText, Verdict};
use motionforge::scene::parse_scene;
use proptest::prelude::*;

const GOLDEN: [&str; 4] = ["basketball", "flag_wind", "water_pour", "basketball_throw"];

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn compile_file(name: &str) -> ScriptText {
    let src = fs::read_to_string(root().join(format!("examples/scenes/{name}.scene"))).unwrap();
    let spec = parse_scene(&src).unwrap();
    emit_script(&spec, &FunctionManifest::builtin(), &AssetCatalog::builtin()).unwrap()
}

#[test]
fn scenes_match_goldens() {
    for name in GOLDEN {
        let golden = fs::read_to_string(root().join(format!("tests/golden/{name}.py"))).unwrap();
        assert_eq!(compile_file(name).body, golden, "{name} drifted from its golden");
    }
}

#[test]
fn compilation_is_deterministic() {
    for name in GOLDEN {
        assert_eq!(compile_file(name), compile_file(name));
    }
}

#[test]
fn goldens_lint_clean() {
    let manifest = FunctionManifest::builtin();
    for name in GOLDEN {
        let report = lint_script(&compile_file(name), &manifest);
        assert_eq!(report.verdict, Verdict::Pass, "{name}: {report}");
        assert!(report.findings.is_empty());
    }
}

#[test]
fn basketball_uses_library_functions() {
    let body = compile_file("basketball").body;
    for call in ["clear_scene()", "create_floor(elasticity=1)", "add_rigid_body(obj_ball, mass=0.625"] {
        assert!(body.contains(call), "missing {call}");
    }
}

fn lint_adversarial(name: &str) -> motionforge::codegen::LintReport {
    let body = fs::read_to_string(root().join(format!("tests/adversarial/{name}.py"))).unwrap();
    lint_script(&ScriptText::llm(body), &FunctionManifest::builtin())
}

#[test]
fn process_spawn_rejected() {
    let report = lint_adversarial("process_spawn");
    assert_eq!(report.verdict, Verdict::Fail);
    let f = report.findings.iter().find(|f| f.kind == FindingKind::ForbiddenCall).expect("forbidden call finding");
    assert!(f.message.contains("forbidden call"));
    assert_eq!(f.line, 6);
}

#[test]
fn foreign_import_rejected() {
    let report = lint_adversarial("foreign_import");
    assert_eq!(report.verdict, Verdict::Fail);
    assert!(report
        .findings
        .iter()
        .any(|f| f.kind == FindingKind::ForeignImport && f.message.contains("bpy")));
}

#[test]
fn path_escape_rejected() {
    let report = lint_adversarial("path_escape");
    assert_eq!(report.verdict, Verdict::Fail);
    assert!(report.findings.iter().any(|f| f.kind == FindingKind::PathEscape));
}

#[derive(Debug, Clone)]
struct Obj {
    physics: usize,
    asset: Option<usize>,
    size: f64,
    pos: (f64, f64, f64),
    velocity: Option<(f64, f64, f64)>,
    throw: bool,
}

fn obj() -> impl Strategy<Value = Obj> {
    (
        0usize..5,
        proptest::option::of(0usize..10),
        0.05f64..3.0,
        (-10.0f64..10.0, -10.0f64..10.0, 4.0f64..10.0),
        proptest::option::of((-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0)),
        any::<bool>(),
    )
        .prop_map(|(physics, asset, size, pos, velocity, throw)| Obj { physics, asset, size, pos, velocity, throw })
}

fn scene_text(objects: &[Obj], floor: bool, wind: Option<(usize, f64)>, cam: (f64, f64, f64), frames: u32) -> String {
    let assets: Vec<String> = AssetCatalog::builtin().iter().map(|a| a.key.clone()).collect();
    let physics = ["rigid", "rigid-passive", "cloth", "liquid-flow", "none"];
    let mut s = format!(
        "scene random {{ frames {frames}; resolution 640 360; }}\ncamera {{ position {} {} {}; look_at 0 0 0; }}\n",
        cam.0, cam.1, cam.2
    );
    if floor {
        s.push_str("floor { elasticity 0.7; }\n");
    }
    if let Some((axis, strength)) = wind {
        let d = ["1 0 0", "0 1 0", "0 0 1", "-1 0 0"][axis];
        s.push_str(&format!("wind {{ direction {d}; strength {strength}; }}\n"));
    }
    for (i, o) in objects.iter().enumerate() {
        s.push_str(&format!("object o{i} {{\n"));
        match o.asset {
            Some(a) => s.push_str(&format!("  asset {};\n", assets[a % assets.len()])),
            None => s.push_str("  primitive sphere;\n"),
        }
        s.push_str(&format!("  size {};\n  position {} {} {};\n", o.size, o.pos.0, o.pos.1, o.pos.2));
        s.push_str(&format!("  physics {};\n", physics[o.physics]));
        if o.physics == 0 {
            if o.throw {
                s.push_str("  throw_at camera;\n");
            } else if let Some(v) = o.velocity {
                s.push_str(&format!("  velocity {} {} {};\n", v.0, v.1, v.2));
            }
        }
        if o.physics == 2 && o.throw {
            s.push_str("  pin top;\n");
        }
        s.push_str("}\n");
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn every_valid_scene_compiles_and_lints_clean(
        objects in proptest::collection::vec(obj(), 0..5),
        floor in any::<bool>(),
        wind in proptest::option::of((0usize..4, 0.0f64..50.0)),
        cam in (-15.0f64..15.0, -15.0f64..15.0, 0.5f64..3.5),
        frames in 1u32..200,
    ) {
        let text = scene_text(&objects, floor, wind, cam, frames);
        let spec = parse_scene(&text);
        prop_assume!(spec.is_ok());
        let spec = spec.unwrap();
        let manifest = FunctionManifest::builtin();
        let script = emit_script(&spec, &manifest, &AssetCatalog::builtin());
        prop_assert!(script.is_ok(), "{:?}\n{}", script.err(), text);
        let script = script.unwrap();
        let report = lint_script(&script, &manifest);
        prop_assert!(report.passed(), "{}\n{}", report, script.body);
        prop_assert_eq!(script, emit_script(&spec, &manifest, &AssetCatalog::builtin()).unwrap());
    }
}
