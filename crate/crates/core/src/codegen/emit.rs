use std::fmt::Write;

use super::manifest::{FunctionManifest, LIBRARY_MODULE};
use super::{Origin, ScriptText};
use crate::assets::AssetCatalog;
use crate::kinematics::{fall_time, projectile_velocity, BallisticQuery, KinematicsError, STANDARD_GRAVITY};
use crate::scene::{canonical_digest, ForceKind, ObjectSpec, Physics, SceneSpec, Source, Vec3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodegenError {
    #[error("asset `{0}` does not resolve in the asset catalog")]
    UnresolvedAsset(String),
    #[error("unsupported by the function library: {0}")]
    Unsupported(String),
    #[error("cannot solve launch velocity for `{object}`: {source}")]
    Kinematics {
        object: String,
        #[source]
        source: KinematicsError,
    },
}

/// Python literal for a float. Integral values print without a fraction,
/// `-0` prints as `0`.
pub(crate) fn py_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x}")
}

fn py_vec(v: Vec3) -> String {
    format!("({}, {}, {})", py_float(v[0]), py_float(v[1]), py_float(v[2]))
}

fn py_fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn py_str(s: &str) -> String {
    let mut out = String::from("'");
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\'' => out.push_str("\\'"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

fn var(object: &ObjectSpec) -> String {
    format!("obj_{}", object.name)
}

struct Emitter<'a> {
    manifest: &'a FunctionManifest,
    out: String,
}

impl Emitter<'_> {
    fn line(&mut self, text: &str) {
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn blank(&mut self) {
        self.out.push('\n');
    }

    fn call(&mut self, assign: Option<&str>, func: &str, args: &[String]) -> Result<(), CodegenError> {
        if !self.manifest.contains(func) {
            return Err(CodegenError::Unsupported(format!("function `{func}` is not in the manifest")));
        }
        if let Some(target) = assign {
            let _ = write!(self.out, "{target} = ");
        }
        let _ = writeln!(self.out, "{func}({})", args.join(", "));
        Ok(())
    }
}

/// Compile a validated scene into a Blender script that only calls the
/// function library.
///
/// Output is a pure function of the inputs: the same spec always yields the
/// same bytes.
pub fn emit_script(
    spec: &SceneSpec,
    manifest: &FunctionManifest,
    assets: &AssetCatalog,
) -> Result<ScriptText, CodegenError> {
    let digest = canonical_digest(spec);
    let mut e = Emitter { manifest, out: String::new() };
    let uses_assets = spec.objects.iter().any(|o| matches!(o.source, Source::Asset(_)));
    let (w, h) = spec.resolution;
    let resolution = format!("({w}, {h})");

    e.line(&format!("# Generated by motionforge from scene {}.", py_str(&spec.name)));
    e.line(&format!("# scene digest: {digest}"));
    if uses_assets {
        e.line("import os");
        e.blank();
    }
    e.line(&format!("from {LIBRARY_MODULE} import *"));
    e.blank();
    if uses_assets {
        e.call(Some("ASSETS_PATH"), "asset_root", &[])?;
        e.blank();
    }

    e.line("# Scene initialization");
    e.call(None, "clear_scene", &[])?;
    let gravity = spec
        .gravity()
        .map(|g| g.direction.map(|d| d * g.strength))
        .unwrap_or([0.0, 0.0, -STANDARD_GRAVITY]);
    e.call(
        None,
        "setup_world",
        &[format!("dimensions={}", py_vec(spec.world.dimensions)), format!("gravity={}", py_vec(gravity))],
    )?;
    e.call(
        None,
        "setup_camera",
        &[
            format!("position={}", py_vec(spec.camera.position)),
            format!("look_at={}", py_vec(spec.camera.look_at)),
        ],
    )?;
    e.call(
        None,
        "configure_render",
        &[format!("resolution={resolution}"), format!("fps={}", spec.fps), format!("frames={}", spec.frames)],
    )?;
    e.blank();

    e.line("# Objects");
    if let Some(floor) = &spec.floor {
        e.call(None, "create_floor", &[format!("elasticity={}", py_float(floor.elasticity))])?;
    }
    for object in &spec.objects {
        let placement = [
            py_str(&object.name),
            format!("size={}", py_float(object.size)),
            format!("position={}", py_vec(object.position)),
        ];
        match &object.source {
            Source::Primitive(kind) => {
                let mut args = vec![py_str(kind.as_str())];
                args.extend(placement);
                e.call(Some(&var(object)), "create_primitive", &args)?;
            }
            Source::Asset(key) => {
                let entry = assets.get(key).ok_or_else(|| CodegenError::UnresolvedAsset(key.clone()))?;
                let mut args = vec![format!("os.path.join(ASSETS_PATH, {})", py_str(&entry.file))];
                args.extend(placement);
                e.call(Some(&var(object)), "import_asset", &args)?;
            }
        }
    }
    e.blank();

    e.line("# Physics");
    let has_domain = spec.objects.iter().any(|o| o.physics == Physics::LiquidDomain);
    for object in &spec.objects {
        emit_physics(&mut e, spec, object, has_domain)?;
    }
    e.blank();

    let winds: Vec<_> = spec.forces.iter().filter(|f| f.kind == ForceKind::Wind).collect();
    if !winds.is_empty() {
        e.line("# Force fields");
        for wind in winds {
            e.call(
                None,
                "add_wind",
                &[format!("direction={}", py_vec(wind.direction)), format!("strength={}", py_float(wind.strength))],
            )?;
        }
        e.blank();
    }

    e.line("# Simulation and condition rendering");
    e.call(None, "bake_physics", &[format!("frames={}", spec.frames)])?;
    e.call(
        None,
        "render_conditions",
        &[format!("frames={}", spec.frames), format!("resolution={resolution}")],
    )?;

    Ok(ScriptText {
        body: e.out,
        origin: Origin::Compiled,
        spec_digest: Some(digest),
    })
}

fn emit_physics(e: &mut Emitter<'_>, spec: &SceneSpec, object: &ObjectSpec, has_domain: bool) -> Result<(), CodegenError> {
    let v = var(object);
    match object.physics {
        Physics::RigidActive | Physics::RigidPassive => {
            let passive = object.physics == Physics::RigidPassive;
            let (mass, elasticity) = match (object.mass, object.elasticity) {
                (Some(m), Some(el)) => (m, el),
                _ => {
                    return Err(CodegenError::Unsupported(format!(
                        "rigid object `{}` lacks mass or elasticity (scene not validated?)",
                        object.name
                    )))
                }
            };
            if passive {
                e.call(None, "add_collision", &[v.clone()])?;
            }
            e.call(
                None,
                "add_rigid_body",
                &[
                    v.clone(),
                    format!("mass={}", py_float(mass)),
                    format!("elasticity={}", py_float(elasticity)),
                    format!("rigid_body_type={}", if passive { "'PASSIVE'" } else { "'ACTIVE'" }),
                ],
            )?;
            emit_launch(e, spec, object)?;
            if has_domain {
                e.call(None, "add_fluid_effector", &[v])?;
            }
        }
        Physics::Cloth => {
            let mut args = vec![v];
            if let Some(pin) = object.pin {
                args.push(format!("pin={}", py_str(pin.as_str())));
            }
            e.call(None, "apply_cloth", &args)?;
        }
        Physics::LiquidFlow => e.call(None, "apply_fluid_flow", &[v])?,
        Physics::LiquidDomain => e.call(None, "apply_fluid_domain", &[v])?,
        Physics::None => {}
    }
    Ok(())
}

fn emit_launch(e: &mut Emitter<'_>, spec: &SceneSpec, object: &ObjectSpec) -> Result<(), CodegenError> {
    let rotation = py_vec(object.initial_rotation.unwrap_or([0.0; 3]));
    let velocity = if object.throw_at_camera {
        let cam = spec.camera.position;
        let (dx, dy) = (cam[0] - object.position[0], cam[1] - object.position[1]);
        let distance = dx.hypot(dy);
        let g = spec.gravity().map_or(STANDARD_GRAVITY, |f| f.strength);
        let drop = object.position[2] - cam[2];
        let query = BallisticQuery::new(object.position[2], cam[2], distance).with_gravity(g);
        let kin = |source| CodegenError::Kinematics { object: object.name.clone(), source };
        let speed = projectile_velocity(&query).map_err(kin)?[1];
        let t = fall_time(drop, g).map_err(kin)?;
        let (ux, uy) = if distance > 0.0 { (dx / distance, dy / distance) } else { (0.0, 0.0) };
        e.line(&format!(
            "# launch velocity from kinematics: falls {} m in {:.6} s while covering {} m to the camera",
            py_float(drop),
            t,
            py_float(distance),
        ));
        format!("({}, {}, {})", py_fixed(ux * speed), py_fixed(uy * speed), py_fixed(0.0))
    } else if let Some(v) = object.initial_velocity {
        py_vec(v)
    } else if object.initial_rotation.is_some() {
        py_vec([0.0; 3])
    } else {
        return Ok(());
    };
    e.call(
        None,
        "add_initial_velocity_for_rigid_body",
        &[var(object), format!("initial_velocity={velocity}"), format!("initial_rotation={rotation}")],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse_scene;

    fn compile(src: &str) -> String {
        let spec = parse_scene(src).unwrap();
        emit_script(&spec, &FunctionManifest::builtin(), &AssetCatalog::builtin()).unwrap().body
    }

    #[test]
    fn literals() {
        assert_eq!(py_float(1.0), "1");
        assert_eq!(py_float(-0.0), "0");
        assert_eq!(py_float(0.625), "0.625");
        assert_eq!(py_float(1e-7), "0.0000001");
        assert_eq!(py_fixed(-1e-9), "0.000000");
        assert_eq!(py_str("it's"), "'it\\'s'");
    }

    #[test]
    fn drop_scene_calls() {
        let body = compile(
            "camera { position 0 -10 2; look_at 0 0 1; }\nfloor { }\n\
             object ball { size 0.24; mass 0.625; position 0 0 4; physics rigid; }",
        );
        assert!(body.contains("clear_scene()"));
        assert!(body.contains("create_floor(elasticity=1)"));
        assert!(body.contains("add_rigid_body(obj_ball, mass=0.625, elasticity=0.5, rigid_body_type='ACTIVE')"));
        assert!(!body.contains("import os"));
    }

    #[test]
    fn thrown_ball_velocity_literal() {
        let body = compile(
            "camera { position 0 13.665 1.8521; look_at 0 0 1; }\n\
             object ball { asset basketball; size 0.24; mass 0.625; position 0 0 4; physics rigid; throw_at camera; }",
        );
        assert!(body.contains("initial_velocity=(0.000000, 20.650"), "{body}");
    }

    #[test]
    fn section_order() {
        let body = compile(
            "camera { position 0 -10 2; look_at 0 0 1; }\nwind { direction 1 0 0; strength 5; }\n\
             object flag { primitive plane; position 0 0 2; physics cloth; pin left; }",
        );
        let idx = |s: &str| body.find(s).unwrap_or_else(|| panic!("missing {s}"));
        assert!(idx("clear_scene") < idx("setup_camera"));
        assert!(idx("setup_camera") < idx("create_primitive"));
        assert!(idx("create_primitive") < idx("apply_cloth(obj_flag, pin='left')"));
        assert!(idx("apply_cloth") < idx("add_wind"));
        assert!(idx("add_wind") < idx("bake_physics"));
        assert!(idx("bake_physics") < idx("render_conditions"));
    }

    #[test]
    fn manifest_gap_is_unsupported() {
        let spec = parse_scene("camera { position 0 -10 2; look_at 0 0 1; }").unwrap();
        let entries = FunctionManifest::builtin()
            .entries()
            .iter()
            .filter(|f| f.name != "bake_physics")
            .cloned()
            .collect();
        let manifest = FunctionManifest::new(entries).unwrap();
        let err = emit_script(&spec, &manifest, &AssetCatalog::builtin()).unwrap_err();
        assert!(matches!(err, CodegenError::Unsupported(_)));
    }

    #[test]
    fn catalog_mismatch_is_unresolved() {
        let spec = parse_scene(
            "camera { position 0 -10 2; look_at 0 0 1; }\nobject m { asset mug; position 0 0 1; }",
        )
        .unwrap();
        let err = emit_script(&spec, &FunctionManifest::builtin(), &AssetCatalog::new()).unwrap_err();
        assert_eq!(err, CodegenError::UnresolvedAsset("mug".into()));
    }
}
