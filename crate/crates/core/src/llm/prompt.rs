use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::LlmError;
use crate::assets::AssetCatalog;
use crate::codegen::FunctionManifest;
use crate::scene::{CameraSpec, Vec3, DEFAULT_WORLD};

pub const PLACEHOLDER: &str = "{PROMPT}";

/// What the model is asked to write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptMode {
    /// A `.scene` document, gated by the scene parser.
    #[default]
    Dsl,
    /// A Blender script, gated by the linter.
    Script,
}

impl PromptMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PromptMode::Dsl => "dsl",
            PromptMode::Script => "script",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldInfo {
    pub dimensions: Vec3,
    pub camera: CameraSpec,
}

impl Default for WorldInfo {
    fn default() -> Self {
        Self {
            dimensions: DEFAULT_WORLD,
            camera: CameraSpec { position: [0.0, -12.0, 2.0], look_at: [0.0, 0.0, 1.5] },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub function_docs: String,
    pub asset_catalog: String,
    pub world_info: String,
    /// Task text; must contain `{PROMPT}` exactly once.
    pub instruction: String,
}

const SCRIPT_INSTRUCTION: &str = "\
Write a Python script for Blender 3.6 that simulates the scene below and renders its edge and depth \
conditions. Start with `from motionforge_blender import *` and call only the functions listed above; \
`math` and `os.path` are also available. Do not import any other module and do not touch files \
outside the asset root. Reply with exactly one ```python fenced block.

Scene: {PROMPT}
";

const DSL_INSTRUCTION: &str = "\
Describe the scene below in the motionforge scene language. A document consists of blocks:

scene NAME { frames N; fps N; resolution W H; world X Y Z; }
camera { position X Y Z; look_at X Y Z; }
floor { elasticity E; }
object NAME { asset KEY; | primitive cube|sphere|plane|cylinder|cone|torus;
              size METERS; position X Y Z;
              physics rigid|rigid-passive|cloth|liquid-flow|liquid-domain|none;
              mass KG; elasticity E; velocity X Y Z; rotation X Y Z; throw_at camera; pin top|bottom|left|right; }
wind { direction X Y Z; strength S; }
gravity { direction 0 0 -1; strength G; }

Exactly one camera is required. Directions are unit vectors. Use real-world sizes and masses. \
Reply with exactly one ``` fenced block holding the document.

Scene: {PROMPT}
";

fn fmt_vec(v: Vec3) -> String {
    format!("({}, {}, {})", v[0], v[1], v[2])
}

impl PromptTemplate {
    pub fn new(mode: PromptMode, manifest: &FunctionManifest, assets: &AssetCatalog, world: &WorldInfo) -> Self {
        let mut catalog = String::new();
        for a in assets.iter() {
            let _ = writeln!(catalog, "- {}: {} (file {}, about {} m)", a.key, a.description, a.file, a.nominal_size);
        }
        let [x, y, z] = world.dimensions;
        let world_info = format!(
            "The world spans {x} m x {y} m horizontally (centred on the origin) and {z} m vertically; the ground is \
             z = 0 and gravity points along -z.\nThe camera sits at {} looking at {}.\n",
            fmt_vec(world.camera.position),
            fmt_vec(world.camera.look_at),
        );
        let instruction = match mode {
            PromptMode::Dsl => DSL_INSTRUCTION,
            PromptMode::Script => SCRIPT_INSTRUCTION,
        };
        Self {
            function_docs: manifest.render_docs(),
            asset_catalog: catalog,
            world_info,
            instruction: instruction.to_string(),
        }
    }

    pub fn check(&self) -> Result<(), LlmError> {
        match self.instruction.matches(PLACEHOLDER).count() {
            1 => Ok(()),
            n => Err(LlmError::Placeholder(n)),
        }
    }
}

/// Fill the template with the user's scene description.
pub fn build_prompt(user_prompt: &str, template: &PromptTemplate) -> Result<String, LlmError> {
    if user_prompt.trim().is_empty() {
        return Err(LlmError::EmptyPrompt);
    }
    template.check()?;
    let mut out = String::new();
    let _ = write!(
        out,
        "# Functions\n\n{}\n# Assets\n\n{}\n# World\n\n{}\n# Instruction\n\n{}",
        template.function_docs,
        template.asset_catalog,
        template.world_info,
        template.instruction.replacen(PLACEHOLDER, user_prompt, 1),
    );
    Ok(out)
}
