//! A tiny fixed-weight denoiser: control branches convolve the edge and
//! depth maps into residual stacks, the main branch runs one attention block
//! and predicts a clean sample through `tanh`.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::attention::{frame_attention, AttentionConfig, FrameFeature, Matrix, ProjectionSet};
use super::backend::{BackendError, DenoiseInput, Denoiser, FrameConditions};
use super::noise::LatentShape;
use super::residual::{combine_control_residuals, ResidualStack};

pub const HIDDEN: usize = 16;
const WEIGHTS_SEED: u64 = 0x6d66_746f_7900;

struct ControlBranch {
    /// One 3x3 kernel per hidden channel, row-major.
    kernels: Matrix,
    w1: Matrix,
}

impl ControlBranch {
    fn stack(&self, map: &[f64], shape: LatentShape) -> ResidualStack {
        let (h, w) = (shape.height as isize, shape.width as isize);
        let mut patches = Matrix::zeros(shape.tokens(), 9);
        for y in 0..h {
            for x in 0..w {
                let row = (y * w + x) as usize;
                for (k, (dy, dx)) in (-1..=1).flat_map(|dy| (-1..=1).map(move |dx| (dy, dx))).enumerate() {
                    let (yy, xx) = ((y + dy).clamp(0, h - 1), (x + dx).clamp(0, w - 1));
                    patches[(row, k)] = map[(yy * w + xx) as usize];
                }
            }
        }
        let level0 = patches * &self.kernels;
        let level1 = level0.map(f64::tanh) * &self.w1;
        ResidualStack::new(vec![level0, level1])
    }
}

pub struct ToyDenoiser {
    channels: usize,
    w_in: Matrix,
    projections: ProjectionSet,
    w_o: Matrix,
    w_out: Matrix,
    edge: ControlBranch,
    depth: ControlBranch,
    edge_scale: f64,
    depth_scale: f64,
}

fn gaussian(rng: &mut ChaCha20Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let values: Vec<f64> = (0..rows * cols).map(|_| StandardNormal.sample(rng)).collect();
    Matrix::from_row_slice(rows, cols, &values) * scale
}

impl ToyDenoiser {
    /// Weights depend only on `channels`; every instance with the same
    /// channel count is identical.
    pub fn new(channels: usize) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(WEIGHTS_SEED ^ channels as u64);
        let fan = |n: usize| 1.0 / (n as f64).sqrt();
        let w_in = gaussian(&mut rng, channels, HIDDEN, fan(channels));
        let projections = ProjectionSet::new(
            gaussian(&mut rng, HIDDEN, HIDDEN, fan(HIDDEN)),
            gaussian(&mut rng, HIDDEN, HIDDEN, fan(HIDDEN)),
            gaussian(&mut rng, HIDDEN, HIDDEN, fan(HIDDEN)),
        )
        .expect("square finite projections");
        let w_o = gaussian(&mut rng, HIDDEN, HIDDEN, fan(HIDDEN));
        let w_out = gaussian(&mut rng, HIDDEN, channels, fan(HIDDEN));
        let mut branch = || ControlBranch {
            kernels: gaussian(&mut rng, 9, HIDDEN, 1.0 / 3.0),
            w1: gaussian(&mut rng, HIDDEN, HIDDEN, fan(HIDDEN)),
        };
        let edge = branch();
        let depth = branch();
        Self { channels, w_in, projections, w_o, w_out, edge, depth, edge_scale: 1.0, depth_scale: 1.0 }
    }

    /// Per-branch weights applied before the residuals are summed.
    pub fn with_control_scales(mut self, edge: f64, depth: f64) -> Self {
        self.edge_scale = edge;
        self.depth_scale = depth;
        self
    }

    fn time_embedding(t: usize) -> Vec<f64> {
        (0..HIDDEN)
            .map(|j| {
                let freq = 1.0 / 10000f64.powf((j / 2) as f64 * 2.0 / HIDDEN as f64);
                let phase = t as f64 * freq;
                0.5 * if j % 2 == 0 { phase.sin() } else { phase.cos() }
            })
            .collect()
    }

    fn controls(&self, c: &FrameConditions, shape: LatentShape) -> Result<ResidualStack, BackendError> {
        let edge = self.edge.stack(&c.latent_edge, shape).scaled(self.edge_scale);
        let depth = self.depth.stack(&c.latent_depth, shape).scaled(self.depth_scale);
        combine_control_residuals(&edge, &depth).map_err(|e| BackendError::Shape(e.to_string()))
    }
}

impl Denoiser for ToyDenoiser {
    fn name(&self) -> String {
        format!("toy(channels={}, hidden={HIDDEN})", self.channels)
    }

    fn predict_noise(&self, input: &DenoiseInput<'_>) -> Result<Vec<Matrix>, BackendError> {
        let shape = input.shape;
        if shape.channels != self.channels {
            return Err(BackendError::Shape(format!("latents have {} channels, model {}", shape.channels, self.channels)));
        }
        for (i, x) in input.latents.iter().enumerate() {
            if x.shape() != (shape.tokens(), shape.channels) {
                return Err(BackendError::Shape(format!("frame {i} latent is {:?}", x.shape())));
            }
        }
        if let Some(c) = input.conditions {
            if c.len() != input.latents.len() {
                return Err(BackendError::Shape(format!("{} condition frames for {} latents", c.len(), input.latents.len())));
            }
        }
        let temb = Self::time_embedding(input.timestep);

        // Stage 1: every frame's pre-attention features, including frame 0's,
        // which the other frames attend to in stage 2.
        let stage1: Vec<(Matrix, Option<ResidualStack>)> = input
            .latents
            .par_iter()
            .enumerate()
            .map(|(i, x)| {
                let mut h = x * &self.w_in;
                for mut row in h.row_iter_mut() {
                    for (v, e) in row.iter_mut().zip(&temb) {
                        *v += e;
                    }
                }
                let controls = match input.conditions {
                    Some(c) => {
                        let stack = self.controls(&c[i], shape)?;
                        h += &stack.levels[0];
                        Some(stack)
                    }
                    None => None,
                };
                Ok((h, controls))
            })
            .collect::<Result<_, BackendError>>()?;
        let features: Vec<FrameFeature> =
            stage1.iter().map(|(h, _)| FrameFeature::new(h.clone())).collect::<Result<_, _>>()?;

        // Stage 2: attention (frame 0 self, others coupled to frame 0), then
        // the clean-sample head.
        let cfg = AttentionConfig::new(HIDDEN, input.alpha)?;
        let ab = input.alpha_bar;
        (0..features.len())
            .into_par_iter()
            .map(|i| {
                let a = frame_attention(input.attention, i, &features[0], &features[i], &self.projections, &cfg)?;
                let mut h = features[i].tokens() + a.tokens() * &self.w_o;
                if let Some(stack) = &stage1[i].1 {
                    h += &stack.levels[1];
                }
                let x0 = (h * &self.w_out).map(f64::tanh);
                Ok((&input.latents[i] - x0 * ab.sqrt()) / (1.0 - ab).sqrt())
            })
            .collect()
    }
}
