use image::imageops::{self, FilterType};
use image::GrayImage;

use super::attention::{AttentionError, AttentionMode, Matrix};
use super::noise::LatentShape;
use crate::render::ConditionSequence;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BackendError {
    #[error("backend request failed: {0}")]
    Transport(String),
    #[error("backend returned HTTP {0}: {1}")]
    Status(u16, String),
    #[error("backend protocol error: {0}")]
    Protocol(String),
    #[error("backend output shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Attention(#[from] AttentionError),
}

/// One frame's condition maps, scaled to [0, 1], at full resolution and
/// resampled onto the latent grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameConditions {
    pub width: u32,
    pub height: u32,
    pub edge: Vec<f32>,
    pub depth: Vec<f32>,
    /// Row-major over the latent grid.
    pub latent_edge: Vec<f64>,
    pub latent_depth: Vec<f64>,
}

fn unit(pixels: &[u8]) -> Vec<f32> {
    pixels.iter().map(|&p| p as f32 / 255.0).collect()
}

fn to_grid(frame: &crate::frames::GrayFrame, shape: LatentShape) -> Vec<f64> {
    let img = GrayImage::from_raw(frame.width(), frame.height(), frame.pixels().to_vec()).expect("frame buffer");
    let small = imageops::resize(&img, shape.width as u32, shape.height as u32, FilterType::Triangle);
    small.into_raw().into_iter().map(|p| p as f64 / 255.0).collect()
}

pub fn prepare_conditions(seq: &ConditionSequence, shape: LatentShape) -> Vec<FrameConditions> {
    let (width, height) = seq.resolution();
    seq.edge()
        .iter()
        .zip(seq.depth())
        .map(|(e, d)| FrameConditions {
            width,
            height,
            edge: unit(e.pixels()),
            depth: unit(d.pixels()),
            latent_edge: to_grid(e, shape),
            latent_depth: to_grid(d, shape),
        })
        .collect()
}

/// Everything a denoiser sees for one call over all frames.
#[derive(Debug, Clone, Copy)]
pub struct DenoiseInput<'a> {
    pub step: usize,
    pub timestep: usize,
    /// Cumulative signal fraction at `timestep`.
    pub alpha_bar: f64,
    pub guidance_scale: f64,
    pub shape: LatentShape,
    /// One `tokens x channels` matrix per frame.
    pub latents: &'a [Matrix],
    /// `None` for the unconditioned pass.
    pub conditions: Option<&'a [FrameConditions]>,
    pub attention: AttentionMode,
    pub alpha: f64,
}

/// A noise predictor over a batch of frames. Implementations couple frames
/// through `input.attention`; frame 0 is the reference frame.
pub trait Denoiser: Sync {
    fn name(&self) -> String;
    fn predict_noise(&self, input: &DenoiseInput<'_>) -> Result<Vec<Matrix>, BackendError>;
}
