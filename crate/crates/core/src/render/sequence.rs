use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RenderError;
use crate::frames::{frame_name, list_indices, GrayFrame};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const EDGE_PREFIX: &str = "edge";
pub const DEPTH_PREFIX: &str = "depth";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DepthEncoding {
    #[serde(rename = "8-bit")]
    Eight,
    #[serde(rename = "16-bit")]
    Sixteen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    PerSequence,
    PerFrame,
}

/// Condition render settings handed to the Blender library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderProfile {
    /// Always Workbench; edge and depth need no ray tracing.
    pub engine: String,
    pub edge_thickness_px: f64,
    pub depth_encoding: DepthEncoding,
    pub normalization: Normalization,
}

impl Default for RenderProfile {
    fn default() -> Self {
        Self {
            engine: "Workbench".into(),
            edge_thickness_px: 2.0,
            depth_encoding: DepthEncoding::Eight,
            normalization: Normalization::PerSequence,
        }
    }
}

/// Contents of `manifest.json` written next to the condition frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderManifest {
    pub frames: usize,
    pub resolution: (u32, u32),
    pub profile: RenderProfile,
    pub blender_version: String,
}

/// Edge and depth frames for one scene, all at one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSequence {
    edge: Vec<GrayFrame>,
    depth: Vec<GrayFrame>,
    resolution: (u32, u32),
    source_digest: Option<String>,
}

impl ConditionSequence {
    pub fn new(edge: Vec<GrayFrame>, depth: Vec<GrayFrame>, source_digest: Option<String>) -> Result<Self, RenderError> {
        if edge.is_empty() {
            return Err(RenderError::Invalid("a condition sequence needs at least one frame".into()));
        }
        if edge.len() != depth.len() {
            return Err(RenderError::FrameCountMismatch { expected: edge.len(), found: depth.len(), what: "depth" });
        }
        let resolution = edge[0].resolution();
        for (i, f) in edge.iter().chain(&depth).enumerate() {
            if f.resolution() != resolution {
                let (kind, idx) = if i < edge.len() { ("edge", i) } else { ("depth", i - edge.len()) };
                return Err(RenderError::ResolutionMismatch {
                    frame: frame_name(kind, idx + 1),
                    expected: resolution,
                    found: f.resolution(),
                });
            }
        }
        Ok(Self { edge, depth, resolution, source_digest })
    }

    pub fn edge(&self) -> &[GrayFrame] {
        &self.edge
    }

    pub fn depth(&self) -> &[GrayFrame] {
        &self.depth
    }

    pub fn frame_count(&self) -> usize {
        self.edge.len()
    }

    pub fn resolution(&self) -> (u32, u32) {
        self.resolution
    }

    pub fn source_digest(&self) -> Option<&str> {
        self.source_digest.as_deref()
    }

    pub fn with_source_digest(mut self, digest: Option<String>) -> Self {
        self.source_digest = digest;
        self
    }

    /// Read `manifest.json` and its frames from `dir`, checking frame counts
    /// and resolutions against the manifest.
    pub fn load_dir(dir: &Path) -> Result<(Self, RenderManifest), RenderError> {
        let manifest_path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&manifest_path)
            .map_err(|e| RenderError::Manifest(format!("{}: {e}", manifest_path.display())))?;
        let manifest: RenderManifest = serde_json::from_str(&text)
            .map_err(|e| RenderError::Manifest(format!("{}: {e}", manifest_path.display())))?;
        if manifest.frames == 0 {
            return Err(RenderError::Manifest("manifest lists zero frames".into()));
        }
        let mut frames = Vec::with_capacity(2);
        for (prefix, what) in [(EDGE_PREFIX, "edge"), (DEPTH_PREFIX, "depth")] {
            let indices = list_indices(dir, prefix)?;
            if indices.len() != manifest.frames || indices.iter().enumerate().any(|(i, &n)| n != i + 1) {
                return Err(RenderError::FrameCountMismatch { expected: manifest.frames, found: indices.len(), what });
            }
            let mut seq = Vec::with_capacity(manifest.frames);
            for i in 1..=manifest.frames {
                let name = frame_name(prefix, i);
                let frame = GrayFrame::load(&dir.join(&name))?;
                if frame.resolution() != manifest.resolution {
                    return Err(RenderError::ResolutionMismatch {
                        frame: name,
                        expected: manifest.resolution,
                        found: frame.resolution(),
                    });
                }
                seq.push(frame);
            }
            frames.push(seq);
        }
        let depth = frames.pop().expect("two sequences");
        let edge = frames.pop().expect("two sequences");
        Ok((Self::new(edge, depth, None)?, manifest))
    }

    /// Write frames and `manifest.json` into `dir`.
    pub fn write_dir(&self, dir: &Path, manifest: &RenderManifest) -> Result<(), RenderError> {
        crate::frames::save_sequence(&self.edge, dir, EDGE_PREFIX)?;
        crate::frames::save_sequence(&self.depth, dir, DEPTH_PREFIX)?;
        let text = serde_json::to_string_pretty(manifest).expect("manifest serializes") + "\n";
        fs::write(dir.join(MANIFEST_FILE), text).map_err(|e| RenderError::Io(format!("{}: {e}", dir.display())))
    }

    /// A manifest describing this sequence.
    pub fn manifest(&self, profile: RenderProfile, blender_version: &str) -> RenderManifest {
        RenderManifest {
            frames: self.frame_count(),
            resolution: self.resolution,
            profile,
            blender_version: blender_version.to_string(),
        }
    }
}
