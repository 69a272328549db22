//! Diffusion-side mechanisms at toy scale: attention variants, control
//! residual combination, shared initial noise, the DDIM loop and the
//! denoiser backends.

pub mod attention;
mod backend;
mod config;
pub mod ddim;
mod external;
pub mod noise;
pub mod residual;
mod sampler;
mod toy;
pub mod wire;

pub use attention::{
    cross_frame_attention, first_frame_attention, self_attention, AttentionConfig, AttentionError, AttentionMode,
    FrameFeature, Matrix, ProjectionSet,
};
pub use backend::{prepare_conditions, BackendError, DenoiseInput, Denoiser, FrameConditions};
pub use config::{BackendKind, SynthesisConfig};
pub use external::ExternalDenoiser;
pub use noise::{shared_noise_batch, LatentShape, NoiseBatch};
pub use residual::{combine_control_residuals, ResidualError, ResidualStack};
pub use sampler::{condition_digest, sample_video, write_output, FrameStack, RunRecord, SynthesisError, RUN_RECORD};
pub use toy::ToyDenoiser;

/// Build the backend `cfg` selects.
pub fn backend_for(cfg: &SynthesisConfig, timeout: std::time::Duration) -> Box<dyn Denoiser> {
    match (&cfg.backend, &cfg.external_url) {
        (BackendKind::External, Some(url)) => Box::new(ExternalDenoiser::new(url, timeout)),
        _ => Box::new(ToyDenoiser::new(cfg.latent_channels).with_control_scales(cfg.edge_scale, cfg.depth_scale)),
    }
}
