//! Catalog of external 3D models the pipeline can import by key.
//!
//! Asset files live under a single asset root; catalog entries only carry
//! paths relative to that root, so generated scripts never mention absolute
//! locations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetEntry {
    pub key: String,
    /// Path relative to the asset root.
    pub file: String,
    pub description: String,
    /// Real-world size in meters (largest extent).
    pub nominal_size: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AssetCatalog {
    entries: BTreeMap<String, AssetEntry>,
}

impl AssetCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// The everyday objects shipped with the Blender function library.
    pub fn builtin() -> Self {
        let mut catalog = Self::new();
        for (key, file, description, size) in [
            ("basketball", "basketball.obj", "Standard size-7 basketball", 0.24),
            ("football", "football.obj", "Association football (soccer ball)", 0.22),
            ("tennis_ball", "tennis_ball.obj", "Yellow tennis ball", 0.067),
            ("bowling_ball", "bowling_ball.obj", "Ten-pin bowling ball", 0.218),
            ("mug", "mug.obj", "White ceramic mug with handle", 0.12),
            ("table", "table.obj", "Wooden dining table", 1.6),
            ("teapot", "teapot.obj", "Porcelain teapot", 0.25),
            ("flagpole", "flagpole.obj", "Metal flagpole", 3.0),
            ("t_shirt", "t_shirt.obj", "Cotton T-shirt mesh", 0.7),
            ("bucket", "bucket.obj", "Plastic bucket", 0.3),
        ] {
            catalog.insert(AssetEntry {
                key: key.to_string(),
                file: file.to_string(),
                description: description.to_string(),
                nominal_size: size,
            });
        }
        catalog
    }

    pub fn insert(&mut self, entry: AssetEntry) -> Option<AssetEntry> {
        self.entries.insert(entry.key.clone(), entry)
    }

    pub fn get(&self, key: &str) -> Option<&AssetEntry> {
        self.entries.get(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Entries in key order.
    pub fn iter(&self) -> impl Iterator<Item = &AssetEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
