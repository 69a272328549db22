//! Denoiser backend that forwards each call to an HTTP service.
//!
//! `POST {base}/denoise` with a [`wire`](super::wire) body holding metadata
//! `{step, timestep, alpha_bar, guidance_scale, conditioned, attention, alpha}`
//! and tensors `latents [N, H, W, C]`, `edge_map [N, h, w]`,
//! `depth_map [N, h, w]` (condition maps in [0, 1]; `[N, 0, 0]` for the
//! unconditioned pass). The reply carries one tensor `noise [N, H, W, C]`.

use std::time::Duration;

use serde_json::json;

use super::attention::Matrix;
use super::backend::{BackendError, DenoiseInput, Denoiser};
use super::wire::{decode, encode, Message, Tensor};

pub struct ExternalDenoiser {
    url: String,
    agent: ureq::Agent,
}

impl ExternalDenoiser {
    pub fn new(base_url: &str, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .new_agent();
        Self { url: format!("{}/denoise", base_url.trim_end_matches('/')), agent }
    }

    pub fn request_body(input: &DenoiseInput<'_>) -> Vec<u8> {
        let s = input.shape;
        let n = input.latents.len() as u32;
        let mut latents = Vec::with_capacity(input.latents.len() * s.len());
        for m in input.latents {
            for row in m.row_iter() {
                latents.extend(row.iter().map(|&v| v as f32));
            }
        }
        let (edge, depth) = match input.conditions {
            Some(c) => {
                let (w, h) = (c[0].width, c[0].height);
                (
                    Tensor::new("edge_map", vec![n, h, w], c.iter().flat_map(|f| f.edge.iter().copied()).collect()),
                    Tensor::new("depth_map", vec![n, h, w], c.iter().flat_map(|f| f.depth.iter().copied()).collect()),
                )
            }
            None => (Tensor::new("edge_map", vec![n, 0, 0], vec![]), Tensor::new("depth_map", vec![n, 0, 0], vec![])),
        };
        encode(&Message {
            meta: json!({
                "step": input.step,
                "timestep": input.timestep,
                "alpha_bar": input.alpha_bar,
                "guidance_scale": input.guidance_scale,
                "conditioned": input.conditions.is_some(),
                "attention": input.attention,
                "alpha": input.alpha,
            }),
            tensors: vec![
                Tensor::new("latents", vec![n, s.height as u32, s.width as u32, s.channels as u32], latents),
                edge,
                depth,
            ],
        })
    }
}

impl Denoiser for ExternalDenoiser {
    fn name(&self) -> String {
        format!("external({})", self.url)
    }

    fn predict_noise(&self, input: &DenoiseInput<'_>) -> Result<Vec<Matrix>, BackendError> {
        let body = Self::request_body(input);
        let mut resp = self
            .agent
            .post(&self.url)
            .header("Content-Type", "application/octet-stream")
            .send(&body[..])
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let bytes = resp
            .body_mut()
            .with_config()
            .limit(1 << 30)
            .read_to_vec()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        if status != 200 {
            let text = String::from_utf8_lossy(&bytes[..bytes.len().min(200)]).into_owned();
            return Err(BackendError::Status(status, text));
        }
        let msg = decode(&bytes).map_err(BackendError::Protocol)?;
        let noise = msg.tensor("noise").ok_or_else(|| BackendError::Protocol("reply has no `noise` tensor".into()))?;
        let s = input.shape;
        let n = input.latents.len();
        let want = vec![n as u32, s.height as u32, s.width as u32, s.channels as u32];
        if noise.dims != want {
            return Err(BackendError::Shape(format!("noise is {:?}, expected {:?}", noise.dims, want)));
        }
        Ok(noise
            .data
            .chunks_exact(s.len())
            .map(|chunk| {
                let values: Vec<f64> = chunk.iter().map(|&v| v as f64).collect();
                Matrix::from_row_slice(s.tokens(), s.channels, &values)
            })
            .collect())
    }
}
