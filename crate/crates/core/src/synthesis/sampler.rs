use std::fs;
use std::path::Path;

use image::imageops::{self, FilterType};
use image::GrayImage;
use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::attention::{AttentionMode, Matrix};
use super::backend::{prepare_conditions, BackendError, DenoiseInput, Denoiser};
use super::config::SynthesisConfig;
use super::ddim::{guidance_blend, DdimSchedule};
use super::noise::{shared_noise_batch, LatentShape};
use crate::frames::{frame_name, GrayFrame};
use crate::render::ConditionSequence;

#[derive(Debug, thiserror::Error)]
pub enum SynthesisError {
    #[error("invalid synthesis config: {0}")]
    Config(String),
    #[error("step {step}: {source}")]
    Backend {
        step: usize,
        #[source]
        source: BackendError,
    },
    #[error("step {step}: non-finite latent values")]
    NonFinite { step: usize },
    #[error(transparent)]
    Frame(#[from] crate::frames::FrameError),
    #[error("{0}")]
    Io(String),
}

/// Generated frames and the final latents they were decoded from.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameStack {
    pub frames: Vec<GrayFrame>,
    pub latents: Vec<Matrix>,
    pub shape: LatentShape,
    pub noise_digest: String,
}

/// SHA-256 over all edge then all depth pixels, with the resolution.
pub fn condition_digest(seq: &ConditionSequence) -> String {
    let mut h = Sha256::new();
    let (w, hgt) = seq.resolution();
    h.update(w.to_le_bytes());
    h.update(hgt.to_le_bytes());
    for f in seq.edge().iter().chain(seq.depth()) {
        h.update(f.pixels());
    }
    hex::encode(h.finalize())
}

fn decode_frame(latent: &Matrix, shape: LatentShape, resolution: (u32, u32)) -> GrayFrame {
    let pixels: Vec<u8> = latent
        .row_iter()
        .map(|row| ((row.mean() + 1.0) * 127.5).round().clamp(0.0, 255.0) as u8)
        .collect();
    let small = GrayImage::from_raw(shape.width as u32, shape.height as u32, pixels).expect("latent grid");
    let full = imageops::resize(&small, resolution.0, resolution.1, FilterType::Triangle);
    GrayFrame::new(resolution.0, resolution.1, full.into_raw()).expect("resized buffer")
}

/// Run the guided DDIM loop over every frame of `seq` from one shared noise
/// tensor. All frames advance through the steps together so frame 0's
/// features are available to the others at every attention site.
pub fn sample_video(
    seq: &ConditionSequence,
    cfg: &SynthesisConfig,
    backend: &dyn Denoiser,
) -> Result<FrameStack, SynthesisError> {
    cfg.validate().map_err(SynthesisError::Config)?;
    let shape = cfg.latent_shape(seq.resolution());
    let noise = shared_noise_batch(cfg.seed, seq.frame_count(), shape);
    let conditions = prepare_conditions(seq, shape);
    let schedule = DdimSchedule::new(cfg.steps);
    let alpha = cfg.resolved_alpha();
    let mut x = noise.frames.clone();

    for (step, &t) in schedule.timesteps().iter().enumerate() {
        let attention = match cfg.cross_frame_steps {
            Some(k) if step >= k => AttentionMode::SelfOnly,
            _ => cfg.attention,
        };
        let input = DenoiseInput {
            step,
            timestep: t,
            alpha_bar: schedule.alpha_bar(t),
            guidance_scale: cfg.guidance_scale,
            shape,
            latents: &x,
            conditions: Some(&conditions),
            attention,
            alpha,
        };
        let call = |input: &DenoiseInput<'_>| -> Result<Vec<Matrix>, SynthesisError> {
            let out = backend.predict_noise(input).map_err(|source| SynthesisError::Backend { step, source })?;
            if out.len() != x.len() || out.iter().any(|m| m.shape() != (shape.tokens(), shape.channels)) {
                let source = BackendError::Shape(format!("expected {} frames of {}x{}", x.len(), shape.tokens(), shape.channels));
                return Err(SynthesisError::Backend { step, source });
            }
            Ok(out)
        };
        let eps_c = call(&input)?;
        let eps_u = call(&DenoiseInput { conditions: None, ..input })?;
        let next: Vec<Matrix> = x
            .par_iter()
            .zip(eps_c.par_iter().zip(&eps_u))
            .map(|(xi, (c, u))| schedule.step(xi, &guidance_blend(u, c, cfg.guidance_scale), t, cfg.clip_sample))
            .collect();
        if next.iter().any(|m| m.iter().any(|v| !v.is_finite())) {
            return Err(SynthesisError::NonFinite { step });
        }
        x = next;
        debug!("step {step} (t = {t}) done");
    }

    let frames = x.par_iter().map(|l| decode_frame(l, shape, seq.resolution())).collect();
    Ok(FrameStack { frames, latents: x, shape, noise_digest: noise.digest() })
}

/// Reproducibility record written next to the frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: SynthesisConfig,
    pub alpha: f64,
    pub backend: String,
    pub frame_count: usize,
    pub resolution: (u32, u32),
    pub latent_shape: LatentShape,
    pub condition_digest: String,
    pub source_digest: Option<String>,
    pub noise_digest: String,
    pub frame_digests: Vec<String>,
}

pub const RUN_RECORD: &str = "run.json";

/// Write `frame_%04d.png` and `run.json` into `dir`.
pub fn write_output(
    dir: &Path,
    stack: &FrameStack,
    seq: &ConditionSequence,
    cfg: &SynthesisConfig,
    backend: &dyn Denoiser,
) -> Result<RunRecord, SynthesisError> {
    fs::create_dir_all(dir).map_err(|e| SynthesisError::Io(format!("{}: {e}", dir.display())))?;
    let mut frame_digests = Vec::with_capacity(stack.frames.len());
    for (i, f) in stack.frames.iter().enumerate() {
        f.save(&dir.join(frame_name("frame", i + 1)))?;
        frame_digests.push(hex::encode(Sha256::digest(f.pixels())));
    }
    let record = RunRecord {
        config: cfg.clone(),
        alpha: cfg.resolved_alpha(),
        backend: backend.name(),
        frame_count: stack.frames.len(),
        resolution: seq.resolution(),
        latent_shape: stack.shape,
        condition_digest: condition_digest(seq),
        source_digest: seq.source_digest().map(str::to_string),
        noise_digest: stack.noise_digest.clone(),
        frame_digests,
    };
    let text = serde_json::to_string_pretty(&record).expect("record serializes") + "\n";
    fs::write(dir.join(RUN_RECORD), text).map_err(|e| SynthesisError::Io(format!("{}: {e}", dir.display())))?;
    Ok(record)
}
