//! Temporal quality metrics over grayscale frame sequences.
//!
//! Sums of absolute differences are accumulated in integers and divided
//! once, so scores on simple inputs come out exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::frames::{load_sequence, FrameError, GrayFrame};

pub const METRICS_FILE: &str = "metrics.json";

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("need at least {need} frames, got {got}")]
    TooFewFrames { need: usize, got: usize },
    #[error("frame {index} is {found:?}, frame 1 is {expected:?}")]
    Resolution { index: usize, expected: (u32, u32), found: (u32, u32) },
    #[error("mask is {found:?}, frames are {expected:?}")]
    MaskShape { expected: (u32, u32), found: (u32, u32) },
    #[error("mask selects no pixels")]
    EmptyMask,
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("external scorer: {0}")]
    External(String),
    #[error("{0}")]
    Io(String),
}

/// Pixels to include in the flicker computation (for example, the static
/// background of a shot).
#[derive(Debug, Clone, PartialEq)]
pub struct PixelMask {
    width: u32,
    height: u32,
    keep: Vec<bool>,
}

impl PixelMask {
    pub fn new(width: u32, height: u32, keep: Vec<bool>) -> Option<Self> {
        (keep.len() == width as usize * height as usize).then_some(Self { width, height, keep })
    }

    /// Nonzero pixels of `frame` are kept.
    pub fn from_frame(frame: &GrayFrame) -> Self {
        Self { width: frame.width(), height: frame.height(), keep: frame.pixels().iter().map(|&p| p != 0).collect() }
    }

    pub fn count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }
}

fn check_frames(frames: &[GrayFrame], need: usize) -> Result<(), MetricsError> {
    if frames.len() < need {
        return Err(MetricsError::TooFewFrames { need, got: frames.len() });
    }
    let expected = frames[0].resolution();
    for (i, f) in frames.iter().enumerate() {
        if f.resolution() != expected {
            return Err(MetricsError::Resolution { index: i + 1, expected, found: f.resolution() });
        }
    }
    Ok(())
}

/// `(1 - sum / denom)` computed as `(denom - sum) / denom`.
fn ratio(sum: u64, denom: u64) -> f64 {
    (denom - sum) as f64 / denom as f64
}

fn pair_sum(a: &GrayFrame, b: &GrayFrame, mask: Option<&PixelMask>) -> u64 {
    let diffs = a.pixels().iter().zip(b.pixels()).map(|(&x, &y)| x.abs_diff(y) as u64);
    match mask {
        Some(m) => diffs.zip(&m.keep).filter(|(_, &k)| k).map(|(d, _)| d).sum(),
        None => diffs.sum(),
    }
}

fn flicker_parts(frames: &[GrayFrame], mask: Option<&PixelMask>) -> Result<(Vec<u64>, u64), MetricsError> {
    check_frames(frames, 2)?;
    let pixels = match mask {
        Some(m) => {
            if (m.width, m.height) != frames[0].resolution() {
                return Err(MetricsError::MaskShape { expected: frames[0].resolution(), found: (m.width, m.height) });
            }
            match m.count() {
                0 => return Err(MetricsError::EmptyMask),
                n => n as u64,
            }
        }
        None => frames[0].pixels().len() as u64,
    };
    Ok((frames.windows(2).map(|w| pair_sum(&w[0], &w[1], mask)).collect(), pixels))
}

/// `1 - mean |f[i+1] - f[i]| / 255` over all consecutive pairs and pixels.
pub fn temporal_flickering(frames: &[GrayFrame], mask: Option<&PixelMask>) -> Result<f64, MetricsError> {
    let (sums, pixels) = flicker_parts(frames, mask)?;
    Ok(ratio(sums.iter().sum(), 255 * pixels * sums.len() as u64))
}

fn smoothness_sums(frames: &[GrayFrame]) -> Result<Vec<u64>, MetricsError> {
    check_frames(frames, 3)?;
    Ok((1..frames.len() - 1)
        .step_by(2)
        .map(|i| {
            let (a, c, b) = (frames[i - 1].pixels(), frames[i].pixels(), frames[i + 1].pixels());
            a.iter()
                .zip(b)
                .zip(c)
                .map(|((&a, &b), &c)| (a as i64 + b as i64 - 2 * c as i64).unsigned_abs())
                .sum()
        })
        .collect())
}

/// Compare every odd frame (0-based) with the pixel average of its
/// neighbours: `1 - mean |(f[i-1] + f[i+1]) / 2 - f[i]| / 255`.
///
/// Stands in for an interpolation-network metric; it rewards motion that is
/// locally linear in intensity.
pub fn motion_smoothness_proxy(frames: &[GrayFrame]) -> Result<f64, MetricsError> {
    let sums = smoothness_sums(frames)?;
    let pixels = frames[0].pixels().len() as u64;
    Ok(ratio(sums.iter().sum(), 2 * 255 * pixels * sums.len() as u64))
}

/// Scores a sequence against its text prompt, e.g. a CLIP service.
pub trait ExternalScorer {
    fn score(&self, frames: &[GrayFrame], prompt: &str) -> Result<f64, String>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub frame_count: usize,
    pub flicker: f64,
    /// Absent for fewer than three frames.
    pub smoothness_proxy: Option<f64>,
    /// One value per consecutive pair.
    pub per_frame_flicker: Vec<f64>,
    /// One value per odd frame with two neighbours.
    pub per_frame_smoothness: Vec<f64>,
    /// Reserved for an external text-video similarity score.
    pub clip_score: Option<f64>,
}

impl MetricReport {
    pub fn compute(frames: &[GrayFrame], mask: Option<&PixelMask>) -> Result<Self, MetricsError> {
        let (sums, pixels) = flicker_parts(frames, mask)?;
        let flicker = ratio(sums.iter().sum(), 255 * pixels * sums.len() as u64);
        let per_frame_flicker = sums.iter().map(|&s| ratio(s, 255 * pixels)).collect();
        let (smoothness_proxy, per_frame_smoothness) = if frames.len() >= 3 {
            let s = smoothness_sums(frames)?;
            let all = frames[0].pixels().len() as u64;
            let total = ratio(s.iter().sum(), 2 * 255 * all * s.len() as u64);
            (Some(total), s.iter().map(|&v| ratio(v, 2 * 255 * all)).collect())
        } else {
            (None, Vec::new())
        };
        Ok(Self {
            frame_count: frames.len(),
            flicker,
            smoothness_proxy,
            per_frame_flicker,
            per_frame_smoothness,
            clip_score: None,
        })
    }

    pub fn with_external(
        mut self,
        scorer: &dyn ExternalScorer,
        frames: &[GrayFrame],
        prompt: &str,
    ) -> Result<Self, MetricsError> {
        self.clip_score = Some(scorer.score(frames, prompt).map_err(MetricsError::External)?);
        Ok(self)
    }
}

/// Score the `frame_%04d.png` files in `dir` and write `metrics.json` there.
pub fn evaluate_dir(dir: &Path, mask: Option<&PixelMask>) -> Result<MetricReport, MetricsError> {
    let frames = load_sequence(dir, "frame")?;
    let report = MetricReport::compute(&frames, mask)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    fs::write(dir.join(METRICS_FILE), text).map_err(|e| MetricsError::Io(format!("{}: {e}", dir.display())))?;
    Ok(report)
}
