//! The `.scene.json` document: a `SceneSpec` plus a top-level `"schema"`
//! version number.

use serde_json::Value;

use super::validate::validate;
use super::{SceneError, SceneErrorKind, SceneSpec};
use crate::assets::AssetCatalog;

pub const SCHEMA_VERSION: u64 = 1;

/// Parse a `.scene.json` document against the builtin asset catalog.
pub fn parse_scene_json(source: &str) -> Result<SceneSpec, SceneError> {
    parse_scene_json_with(source, &AssetCatalog::builtin())
}

pub fn parse_scene_json_with(source: &str, catalog: &AssetCatalog) -> Result<SceneSpec, SceneError> {
    let schema_err = |path: &str, msg: String| SceneError::at_field(SceneErrorKind::Schema, path, msg);

    let mut value: Value = serde_json::from_str(source).map_err(|e| {
        SceneError::at_text(SceneErrorKind::Syntax, e.line(), e.column(), e.to_string())
    })?;
    let object = value
        .as_object_mut()
        .ok_or_else(|| schema_err("", "document must be a JSON object".into()))?;
    match object.remove("schema") {
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(other) => {
            return Err(schema_err("schema", format!("unsupported schema version {other}, expected {SCHEMA_VERSION}")))
        }
        None => return Err(schema_err("schema", "missing `schema` field".into())),
    }

    let spec: SceneSpec = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        schema_err(&path, e.into_inner().to_string())
    })?;
    validate(spec, catalog)
}

/// Serialize to the canonical `.scene.json` form (pretty-printed).
pub fn to_json(spec: &SceneSpec) -> String {
    let mut value = serde_json::to_value(spec).expect("SceneSpec serializes");
    let object = value.as_object_mut().expect("SceneSpec is a struct");
    object.insert("schema".into(), Value::from(SCHEMA_VERSION));
    let mut out = serde_json::to_string_pretty(&value).expect("JSON value serializes");
    out.push('\n');
    out
}
