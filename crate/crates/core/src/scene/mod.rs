//! Scene description: the canonical `SceneSpec` and its two surface forms,
//! the block-oriented `.scene` language and the `.scene.json` document.
//!
//! A `.scene` file looks like this:
//!
//! ```text
//! scene basketball_drop {
//!     frames 80;
//!     world 30 30 15;
//! }
//! camera { position 0 -12 2; look_at 0 0 1; }
//! floor { elasticity 1; }
//! object ball {
//!     asset basketball;
//!     size 0.24; mass 0.625; position 0 0 4;
//!     physics rigid; elasticity 0.8;
//! }
//! ```
//!
//! Both parsers funnel into the same validation pass, so a spec is valid no
//! matter which form it came from.

mod digest;
mod dsl;
mod json;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use digest::canonical_digest;
pub use dsl::{parse_scene, parse_scene_with};
pub use json::{parse_scene_json, parse_scene_json_with, to_json, SCHEMA_VERSION};
pub use validate::validate;

pub type Vec3 = [f64; 3];

pub const DEFAULT_FRAMES: u32 = 80;
pub const DEFAULT_FPS: u32 = 24;
pub const DEFAULT_RESOLUTION: (u32, u32) = (1920, 1080);
pub const DEFAULT_WORLD: Vec3 = [30.0, 30.0, 15.0];
pub const DEFAULT_MASS: f64 = 1.0;
pub const DEFAULT_ELASTICITY: f64 = 0.5;
pub const DEFAULT_FLOOR_ELASTICITY: f64 = 1.0;
/// Name given to the fluid domain inserted for liquid scenes that lack one.
pub const AUTO_DOMAIN_NAME: &str = "fluid_domain";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub name: String,
    #[serde(default = "default_frames")]
    pub frames: u32,
    #[serde(default = "default_fps")]
    pub fps: u32,
    #[serde(default = "default_resolution")]
    pub resolution: (u32, u32),
    pub camera: CameraSpec,
    #[serde(default)]
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub forces: Vec<ForceSpec>,
    #[serde(default)]
    pub floor: Option<FloorSpec>,
    #[serde(default)]
    pub world: WorldConfig,
}

fn default_frames() -> u32 {
    DEFAULT_FRAMES
}

fn default_fps() -> u32 {
    DEFAULT_FPS
}

fn default_resolution() -> (u32, u32) {
    DEFAULT_RESOLUTION
}

impl SceneSpec {
    pub fn object(&self, name: &str) -> Option<&ObjectSpec> {
        self.objects.iter().find(|o| o.name == name)
    }

    /// Dominant material of the scene: liquid beats cloth beats rigid.
    pub fn material(&self) -> Material {
        let has = |pred: fn(Physics) -> bool| self.objects.iter().any(|o| pred(o.physics));
        if has(Physics::is_liquid) {
            Material::Liquid
        } else if has(|p| p == Physics::Cloth) {
            Material::Cloth
        } else {
            Material::Rigid
        }
    }

    pub fn gravity(&self) -> Option<&ForceSpec> {
        self.forces.iter().find(|f| f.kind == ForceKind::GravityOverride)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraSpec {
    pub position: Vec3,
    pub look_at: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub name: String,
    #[serde(default)]
    pub source: Source,
    #[serde(default = "default_size")]
    pub size: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    pub position: Vec3,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elasticity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_velocity: Option<Vec3>,
    /// Raw initial angular velocity (rad/s); never derived.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_rotation: Option<Vec3>,
    /// Solve `initial_velocity` at compile time so the object reaches the
    /// camera when it has fallen to camera height.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub throw_at_camera: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pin: Option<PinEdge>,
}

fn default_size() -> f64 {
    1.0
}

impl ObjectSpec {
    /// An object with every optional field unset.
    pub fn new(name: impl Into<String>, position: Vec3) -> Self {
        Self {
            name: name.into(),
            source: Source::default(),
            size: default_size(),
            mass: None,
            position,
            physics: Physics::None,
            elasticity: None,
            initial_velocity: None,
            initial_rotation: None,
            throw_at_camera: false,
            pin: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Primitive(PrimitiveKind),
    Asset(String),
}

impl Default for Source {
    fn default() -> Self {
        Source::Primitive(PrimitiveKind::Sphere)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveKind {
    Cube,
    Sphere,
    Plane,
    Cylinder,
    Cone,
    Torus,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 6] = [
        PrimitiveKind::Cube,
        PrimitiveKind::Sphere,
        PrimitiveKind::Plane,
        PrimitiveKind::Cylinder,
        PrimitiveKind::Cone,
        PrimitiveKind::Torus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PrimitiveKind::Cube => "cube",
            PrimitiveKind::Sphere => "sphere",
            PrimitiveKind::Plane => "plane",
            PrimitiveKind::Cylinder => "cylinder",
            PrimitiveKind::Cone => "cone",
            PrimitiveKind::Torus => "torus",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == word)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Physics {
    RigidActive,
    RigidPassive,
    Cloth,
    LiquidFlow,
    LiquidDomain,
    #[default]
    None,
}

impl Physics {
    pub const ALL: [Physics; 6] = [
        Physics::RigidActive,
        Physics::RigidPassive,
        Physics::Cloth,
        Physics::LiquidFlow,
        Physics::LiquidDomain,
        Physics::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Physics::RigidActive => "rigid-active",
            Physics::RigidPassive => "rigid-passive",
            Physics::Cloth => "cloth",
            Physics::LiquidFlow => "liquid-flow",
            Physics::LiquidDomain => "liquid-domain",
            Physics::None => "none",
        }
    }

    /// `rigid` is accepted as shorthand for `rigid-active`.
    pub fn from_keyword(word: &str) -> Option<Self> {
        if word == "rigid" {
            return Some(Physics::RigidActive);
        }
        Self::ALL.into_iter().find(|p| p.as_str() == word)
    }

    pub fn is_rigid(self) -> bool {
        matches!(self, Physics::RigidActive | Physics::RigidPassive)
    }

    pub fn is_liquid(self) -> bool {
        matches!(self, Physics::LiquidFlow | Physics::LiquidDomain)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinEdge {
    Top,
    Bottom,
    Left,
    Right,
}

impl PinEdge {
    pub fn as_str(self) -> &'static str {
        match self {
            PinEdge::Top => "top",
            PinEdge::Bottom => "bottom",
            PinEdge::Left => "left",
            PinEdge::Right => "right",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        [PinEdge::Top, PinEdge::Bottom, PinEdge::Left, PinEdge::Right]
            .into_iter()
            .find(|e| e.as_str() == word)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceSpec {
    pub kind: ForceKind,
    pub direction: Vec3,
    /// Engine units for wind, m/s² for gravity.
    pub strength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForceKind {
    Wind,
    GravityOverride,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloorSpec {
    #[serde(default = "default_floor_elasticity")]
    pub elasticity: f64,
}

impl Default for FloorSpec {
    fn default() -> Self {
        Self {
            elasticity: DEFAULT_FLOOR_ELASTICITY,
        }
    }
}

fn default_floor_elasticity() -> f64 {
    DEFAULT_FLOOR_ELASTICITY
}

/// Extents of the virtual world in meters (x, y, z), centred on the origin
/// horizontally with the ground at z = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldConfig {
    pub dimensions: Vec3,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            dimensions: DEFAULT_WORLD,
        }
    }
}

/// Material class used to pick the cross-frame attention weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Material {
    Rigid,
    Cloth,
    Liquid,
}

impl Material {
    /// Tuned α for the first-frame key block.
    pub fn default_alpha(self) -> f64 {
        match self {
            Material::Rigid => 0.9,
            Material::Cloth => 0.75,
            Material::Liquid => 0.4,
        }
    }
}

/// Where an error was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    /// 1-based line and column in DSL text.
    Text { line: usize, column: usize },
    /// Field path into the structured document, e.g. `objects[0].mass`.
    Field(String),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Text { line, column } => write!(f, "{line}:{column}"),
            Location::Field(path) if path.is_empty() => f.write_str("<root>"),
            Location::Field(path) => f.write_str(path),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneErrorKind {
    Syntax,
    UnknownKeyword,
    DuplicateObject,
    DuplicateCamera,
    MissingCamera,
    UnknownAsset,
    Schema,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{location}: {message}")]
pub struct SceneError {
    pub kind: SceneErrorKind,
    pub location: Location,
    pub message: String,
}

impl SceneError {
    pub(crate) fn at_text(kind: SceneErrorKind, line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            kind,
            location: Location::Text { line, column },
            message: message.into(),
        }
    }

    pub(crate) fn at_field(kind: SceneErrorKind, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            kind,
            location: Location::Field(path.into()),
            message: message.into(),
        }
    }
}
