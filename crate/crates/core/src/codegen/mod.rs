//! Scene-to-script compilation, the Blender function manifest and the
//! static script linter.

mod emit;
mod lint;
mod manifest;
mod pytoken;

use serde::{Deserialize, Serialize};

pub use emit::{emit_script, CodegenError};
pub use lint::{lint_script, lint_with_policy, Finding, FindingKind, LintPolicy, LintReport, Verdict};
pub use manifest::{Category, FunctionEntry, FunctionManifest, ManifestError, Param, LIBRARY_MODULE, LIBRARY_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Compiled,
    Llm,
}

/// A Blender Python script and where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptText {
    pub body: String,
    pub origin: Origin,
    /// Canonical digest of the scene a compiled script was generated from.
    pub spec_digest: Option<String>,
}

impl ScriptText {
    pub fn llm(body: impl Into<String>) -> Self {
        Self { body: body.into(), origin: Origin::Llm, spec_digest: None }
    }
}
