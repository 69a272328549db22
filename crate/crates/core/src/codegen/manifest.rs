use std::collections::HashSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

/// Python module name of the Blender-side function library.
pub const LIBRARY_MODULE: &str = "motionforge_blender";
/// Bumped whenever the library's behaviour changes; part of render cache keys.
pub const LIBRARY_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    SceneInitRender,
    ObjectCreateImport,
    PhysicsEffect,
}

impl Category {
    pub const ALL: [Category; 3] = [
        Category::SceneInitRender,
        Category::ObjectCreateImport,
        Category::PhysicsEffect,
    ];

    pub fn title(self) -> &'static str {
        match self {
            Category::SceneInitRender => "Scene initialization and rendering",
            Category::ObjectCreateImport => "Object creation and import",
            Category::PhysicsEffect => "Physics effects",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
    /// Python literal of the default value, if the parameter is optional.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionEntry {
    pub name: String,
    pub params: Vec<Param>,
    pub category: Category,
    pub doc: String,
}

impl FunctionEntry {
    pub fn signature(&self) -> String {
        let params: Vec<String> = self
            .params
            .iter()
            .map(|p| match &p.default {
                Some(d) => format!("{}: {} = {}", p.name, p.ty, d),
                None => format!("{}: {}", p.name, p.ty),
            })
            .collect();
        format!("{}({})", self.name, params.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ManifestError {
    #[error("function `{0}` is listed twice")]
    DuplicateName(String),
    #[error("no function in category `{0:?}`")]
    EmptyCategory(Category),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionManifest {
    entries: Vec<FunctionEntry>,
}

impl FunctionManifest {
    pub fn new(entries: Vec<FunctionEntry>) -> Result<Self, ManifestError> {
        let mut seen = HashSet::new();
        for entry in &entries {
            if !seen.insert(entry.name.as_str()) {
                return Err(ManifestError::DuplicateName(entry.name.clone()));
            }
        }
        for category in Category::ALL {
            if !entries.iter().any(|e| e.category == category) {
                return Err(ManifestError::EmptyCategory(category));
            }
        }
        Ok(Self { entries })
    }

    /// The functions shipped in the `motionforge_blender` library.
    pub fn builtin() -> Self {
        use Category::*;
        let f = |name: &str, params: &[(&str, &str, Option<&str>)], category, doc: &str| FunctionEntry {
            name: name.to_string(),
            params: params
                .iter()
                .map(|(n, t, d)| Param {
                    name: n.to_string(),
                    ty: t.to_string(),
                    default: d.map(str::to_string),
                })
                .collect(),
            category,
            doc: doc.to_string(),
        };
        let entries = vec![
            f("clear_scene", &[], SceneInitRender,
              "Remove every object, camera and light from the current scene."),
            f("asset_root", &[], SceneInitRender,
              "Return the directory holding the external 3D asset files."),
            f("setup_world", &[("dimensions", "vec3", None), ("gravity", "vec3", Some("(0, 0, -9.81)"))], SceneInitRender,
              "Set the world extents in meters (x, y, z) and the gravity vector in m/s^2."),
            f("setup_camera", &[("position", "vec3", None), ("look_at", "vec3", None)], SceneInitRender,
              "Create the single scene camera at `position`, aimed at `look_at`."),
            f("configure_render", &[("resolution", "(int, int)", None), ("fps", "int", Some("24")), ("frames", "int", Some("80"))], SceneInitRender,
              "Select the Workbench engine, enable the Freestyle edge pass and the normalized Z depth pass."),
            f("bake_physics", &[("frames", "int", None)], SceneInitRender,
              "Bake all rigid body, cloth and fluid caches for frames 1..frames."),
            f("render_conditions", &[("frames", "int", None), ("resolution", "(int, int)", None)], SceneInitRender,
              "Render edge_%04d.png and depth_%04d.png for every frame into the output directory and write manifest.json."),
            f("create_floor", &[("elasticity", "float", Some("1"))], ObjectCreateImport,
              "Create a ground plane named GROUND scaled 50x, with collision and a passive rigid body."),
            f("create_primitive", &[("kind", "str", None), ("name", "str", None), ("size", "float", Some("1")), ("position", "vec3", Some("(0, 0, 0)"))], ObjectCreateImport,
              "Create a cube, sphere, plane, cylinder, cone or torus of the given size (meters) and return it."),
            f("import_asset", &[("path", "path", None), ("name", "str", None), ("size", "float", Some("1")), ("position", "vec3", Some("(0, 0, 0)"))], ObjectCreateImport,
              "Import an external model, scale its largest extent to `size` meters, place it and return it."),
            f("add_collision", &[("obj", "object", None)], PhysicsEffect,
              "Add a collision modifier so other bodies bounce off or slide along the object."),
            f("add_rigid_body", &[("obj", "object", None), ("mass", "float", Some("1")), ("elasticity", "float", Some("0.5")), ("rigid_body_type", "str", Some("'ACTIVE'"))], PhysicsEffect,
              "Make the object a rigid body (ACTIVE or PASSIVE) with mesh collision shape, mass in kg and restitution in [0, 1]."),
            f("add_initial_velocity_for_rigid_body", &[("obj", "object", None), ("initial_velocity", "vec3", None), ("initial_rotation", "vec3", Some("(0, 0, 0)"))], PhysicsEffect,
              "Launch an active rigid body with a linear velocity (m/s) and angular velocity (rad/s)."),
            f("apply_cloth", &[("obj", "object", None), ("quality", "int", Some("5")), ("pin", "str", Some("None"))], PhysicsEffect,
              "Turn the object into cloth; `pin` names an edge (top, bottom, left, right) held fixed."),
            f("apply_fluid_flow", &[("obj", "object", None), ("behavior", "str", Some("'INFLOW'"))], PhysicsEffect,
              "Make the object emit liquid into the enclosing fluid domain."),
            f("apply_fluid_domain", &[("obj", "object", None), ("viscosity", "float", Some("1e-06"))], PhysicsEffect,
              "Make the object the liquid simulation domain; viscosity in m^2/s."),
            f("add_fluid_effector", &[("obj", "object", None)], PhysicsEffect,
              "Let liquid collide with the object."),
            f("add_wind", &[("direction", "vec3", None), ("strength", "float", None)], PhysicsEffect,
              "Add a wind force field blowing along `direction`; strength 0-10 is a breeze, 30+ a gale."),
        ];
        Self::new(entries).expect("builtin manifest is well formed")
    }

    pub fn get(&self, name: &str) -> Option<&FunctionEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    pub fn entries(&self) -> &[FunctionEntry] {
        &self.entries
    }

    /// Human-readable reference grouped by category, for prompts.
    pub fn render_docs(&self) -> String {
        let mut out = String::new();
        for category in Category::ALL {
            let _ = writeln!(out, "## {}", category.title());
            for entry in self.entries.iter().filter(|e| e.category == category) {
                let _ = writeln!(out, "{}\n    {}", entry.signature(), entry.doc);
            }
            out.push('\n');
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
        out
    }
}
