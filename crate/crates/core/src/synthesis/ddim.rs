//! Deterministic DDIM schedule (eta = 0) and the guidance blend.

use super::attention::Matrix;

pub const TRAIN_TIMESTEPS: usize = 1000;
const BETA_START: f64 = 0.00085;
const BETA_END: f64 = 0.012;
const STEPS_OFFSET: usize = 1;

/// Scaled-linear beta schedule with evenly spaced ("leading") timesteps.
#[derive(Debug, Clone)]
pub struct DdimSchedule {
    alphas_cumprod: Vec<f64>,
    timesteps: Vec<usize>,
    step_ratio: usize,
}

impl DdimSchedule {
    pub fn new(steps: usize) -> Self {
        assert!((1..=TRAIN_TIMESTEPS).contains(&steps), "steps must be in 1..={TRAIN_TIMESTEPS}");
        let (a, b) = (BETA_START.sqrt(), BETA_END.sqrt());
        let mut alphas_cumprod = Vec::with_capacity(TRAIN_TIMESTEPS);
        let mut prod = 1.0;
        for i in 0..TRAIN_TIMESTEPS {
            let beta = (a + (b - a) * i as f64 / (TRAIN_TIMESTEPS - 1) as f64).powi(2);
            prod *= 1.0 - beta;
            alphas_cumprod.push(prod);
        }
        let step_ratio = TRAIN_TIMESTEPS / steps;
        let timesteps = (0..steps).rev().map(|i| i * step_ratio + STEPS_OFFSET).collect();
        Self { alphas_cumprod, timesteps, step_ratio }
    }

    /// Timesteps from noisiest to cleanest.
    pub fn timesteps(&self) -> &[usize] {
        &self.timesteps
    }

    pub fn alpha_bar(&self, t: usize) -> f64 {
        self.alphas_cumprod[t]
    }

    fn alpha_bar_prev(&self, t: usize) -> f64 {
        match t.checked_sub(self.step_ratio) {
            Some(p) => self.alphas_cumprod[p],
            None => self.alphas_cumprod[0],
        }
    }

    /// Clean-sample estimate from a noise prediction.
    pub fn predict_x0(&self, x: &Matrix, eps: &Matrix, t: usize) -> Matrix {
        let ab = self.alpha_bar(t);
        (x - eps * (1.0 - ab).sqrt()) / ab.sqrt()
    }

    /// Noise implied by a clean-sample prediction.
    pub fn eps_from_x0(&self, x: &Matrix, x0: &Matrix, t: usize) -> Matrix {
        let ab = self.alpha_bar(t);
        (x - x0 * ab.sqrt()) / (1.0 - ab).sqrt()
    }

    /// One eta = 0 update from timestep `t`. With `clip`, the x0 estimate is
    /// clamped to [-1, 1] and the noise re-derived from it.
    pub fn step(&self, x: &Matrix, eps: &Matrix, t: usize, clip: bool) -> Matrix {
        let mut x0 = self.predict_x0(x, eps, t);
        let eps = if clip {
            x0.apply(|v| *v = v.clamp(-1.0, 1.0));
            self.eps_from_x0(x, &x0, t)
        } else {
            eps.clone()
        };
        let prev = self.alpha_bar_prev(t);
        x0 * prev.sqrt() + eps * (1.0 - prev).sqrt()
    }
}

/// Classifier-free guidance, written as `(1 - g) eps_u + g eps_c` so that
/// `g = 1` returns `eps_c` exactly.
pub fn guidance_blend(eps_uncond: &Matrix, eps_cond: &Matrix, g: f64) -> Matrix {
    eps_uncond * (1.0 - g) + eps_cond * g
}
