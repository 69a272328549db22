use serde::{Deserialize, Serialize};

use super::attention::AttentionMode;
use super::noise::LatentShape;
use crate::scene::Material;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Toy,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthesisConfig {
    pub steps: usize,
    pub guidance_scale: f64,
    pub seed: u64,
    /// Cross-frame key weight; `None` picks the material default.
    pub alpha: Option<f64>,
    pub material: Material,
    pub backend: BackendKind,
    /// Base URL of the external denoiser (`/denoise` is appended).
    pub external_url: Option<String>,
    pub attention: AttentionMode,
    /// Apply cross-frame attention only during the first k steps; `None`
    /// means every step.
    pub cross_frame_steps: Option<usize>,
    pub edge_scale: f64,
    pub depth_scale: f64,
    /// Clamp the x0 estimate to [-1, 1] in every update.
    pub clip_sample: bool,
    pub latent_channels: usize,
    /// Longest side of the latent grid; the downsampling factor is at least 8.
    pub latent_max_side: usize,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            steps: 50,
            guidance_scale: 7.5,
            seed: 0,
            alpha: None,
            material: Material::Rigid,
            backend: BackendKind::Toy,
            external_url: None,
            attention: AttentionMode::CrossFrame,
            cross_frame_steps: None,
            edge_scale: 1.0,
            depth_scale: 1.0,
            clip_sample: true,
            latent_channels: 4,
            latent_max_side: 64,
        }
    }
}

impl SynthesisConfig {
    pub fn resolved_alpha(&self) -> f64 {
        self.alpha.unwrap_or_else(|| self.material.default_alpha())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.steps == 0 || self.steps > super::ddim::TRAIN_TIMESTEPS {
            return Err(format!("steps must be in 1..={}, got {}", super::ddim::TRAIN_TIMESTEPS, self.steps));
        }
        if !(self.guidance_scale >= 1.0 && self.guidance_scale.is_finite()) {
            return Err(format!("guidance_scale must be a finite value >= 1, got {}", self.guidance_scale));
        }
        let alpha = self.resolved_alpha();
        if !(0.0..=1.0).contains(&alpha) {
            return Err(format!("alpha must be in [0, 1], got {alpha}"));
        }
        if self.latent_channels == 0 || self.latent_max_side == 0 {
            return Err("latent_channels and latent_max_side must be positive".into());
        }
        if !(self.edge_scale.is_finite() && self.depth_scale.is_finite()) {
            return Err("control scales must be finite".into());
        }
        if self.backend == BackendKind::External && self.external_url.is_none() {
            return Err("the external backend needs external_url".into());
        }
        Ok(())
    }

    /// Latent grid for frames of `resolution`.
    pub fn latent_shape(&self, resolution: (u32, u32)) -> LatentShape {
        let (w, h) = (resolution.0 as usize, resolution.1 as usize);
        let factor = 8.max(w.max(h).div_ceil(self.latent_max_side));
        LatentShape { height: h.div_ceil(factor), width: w.div_ceil(factor), channels: self.latent_channels }
    }
}
