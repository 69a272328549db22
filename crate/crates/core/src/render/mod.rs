//! Headless Blender runs, condition sequence ingestion and the render cache.

mod blender;
mod cache;
mod sequence;

use std::path::PathBuf;
use std::time::Duration;

pub use blender::{CacheStatus, Renderer, DEFAULT_TIMEOUT, PINNED_VERSION};
pub use cache::{CacheKey, ContentCache};
pub use sequence::{
    ConditionSequence, DepthEncoding, Normalization, RenderManifest, RenderProfile, DEPTH_PREFIX, EDGE_PREFIX,
    MANIFEST_FILE,
};

use crate::frames::FrameError;

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("script rejected by lint: {0}")]
    LintRejected(String),
    #[error("blender binary not found: {}", .0.display())]
    BlenderNotFound(PathBuf),
    #[error("blender exited with {}:\n{log_tail}", code.map_or("a signal".to_string(), |c| format!("status {c}")))]
    Exit { code: Option<i32>, log_tail: String },
    #[error("render timed out after {0:?}; blender was killed")]
    Timeout(Duration),
    #[error("frame count mismatch: manifest lists {expected} frames, found {found} {what} frames")]
    FrameCountMismatch { expected: usize, found: usize, what: &'static str },
    #[error("resolution mismatch in {frame}: expected {}x{}, found {}x{}", expected.0, expected.1, found.0, found.1)]
    ResolutionMismatch { frame: String, expected: (u32, u32), found: (u32, u32) },
    #[error("bad render manifest: {0}")]
    Manifest(String),
    #[error("invalid condition sequence: {0}")]
    Invalid(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("{0}")]
    Io(String),
}
