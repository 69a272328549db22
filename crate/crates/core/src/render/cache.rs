use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use sha2::{Digest, Sha256};

use super::sequence::{ConditionSequence, RenderManifest};
use super::RenderError;
use crate::codegen::{ScriptText, LIBRARY_VERSION};

const CHECKSUMS: &str = "checksums.json";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheKey(String);

impl CacheKey {
    /// Key over scene digest, Blender version and function library version.
    pub fn new(spec_digest: &str, blender_version: &str) -> Self {
        let mut h = Sha256::new();
        for part in [spec_digest, blender_version, LIBRARY_VERSION] {
            h.update(part.as_bytes());
            h.update([0]);
        }
        Self(hex::encode(h.finalize()))
    }

    /// Compiled scripts key on their scene digest; scripts without one
    /// (model-written) key on a hash of their text.
    pub fn for_script(script: &ScriptText, blender_version: &str) -> Self {
        match &script.spec_digest {
            Some(d) => Self::new(d, blender_version),
            None => Self::new(&format!("script:{}", hex::encode(Sha256::digest(script.body.as_bytes()))), blender_version),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CacheKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Content-addressed directory store of rendered condition sequences.
/// Each entry holds the frames, `manifest.json` and a checksum list; an
/// entry failing verification is reported and treated as absent.
#[derive(Debug, Clone)]
pub struct ContentCache {
    root: PathBuf,
}

fn sha_file(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

impl ContentCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entry_dir(&self, key: &CacheKey) -> PathBuf {
        self.root.join(key.as_str())
    }

    pub fn get(&self, key: &CacheKey) -> Option<ConditionSequence> {
        let dir = self.entry_dir(key);
        if !dir.is_dir() {
            return None;
        }
        match self.verify_and_load(&dir) {
            Ok(seq) => Some(seq),
            Err(reason) => {
                warn!("render cache entry {key} is corrupt ({reason}); ignoring it");
                None
            }
        }
    }

    fn verify_and_load(&self, dir: &Path) -> Result<ConditionSequence, String> {
        let text = fs::read_to_string(dir.join(CHECKSUMS)).map_err(|e| format!("{CHECKSUMS}: {e}"))?;
        let sums: BTreeMap<String, String> = serde_json::from_str(&text).map_err(|e| format!("{CHECKSUMS}: {e}"))?;
        for (file, expected) in &sums {
            if file.contains('/') || file.contains("..") {
                return Err(format!("bad file name {file}"));
            }
            let actual = sha_file(&dir.join(file)).map_err(|e| format!("{file}: {e}"))?;
            if &actual != expected {
                return Err(format!("{file} checksum mismatch"));
            }
        }
        let (seq, _) = ConditionSequence::load_dir(dir).map_err(|e| e.to_string())?;
        let expected_files = 2 * seq.frame_count() + 1;
        if sums.len() != expected_files {
            return Err(format!("checksum list covers {} files, expected {expected_files}", sums.len()));
        }
        Ok(seq)
    }

    /// Store `seq` under `key`, replacing any previous entry.
    pub fn put(&self, key: &CacheKey, seq: &ConditionSequence, manifest: &RenderManifest) -> Result<(), RenderError> {
        let io = |e: std::io::Error| RenderError::Io(format!("render cache {}: {e}", self.root.display()));
        fs::create_dir_all(&self.root).map_err(io)?;
        let staging = self.root.join(format!(".{key}.{}", std::process::id()));
        if staging.exists() {
            fs::remove_dir_all(&staging).map_err(io)?;
        }
        seq.write_dir(&staging, manifest)?;
        let mut sums = BTreeMap::new();
        for entry in fs::read_dir(&staging).map_err(io)? {
            let entry = entry.map_err(io)?;
            let name = entry.file_name().to_string_lossy().into_owned();
            sums.insert(name, sha_file(&entry.path()).map_err(io)?);
        }
        fs::write(staging.join(CHECKSUMS), serde_json::to_string_pretty(&sums).expect("serializes")).map_err(io)?;
        let dest = self.entry_dir(key);
        if dest.exists() {
            fs::remove_dir_all(&dest).map_err(io)?;
        }
        fs::rename(&staging, &dest).map_err(io)
    }
}
