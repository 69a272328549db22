//! Self, cross-frame and first-frame attention over token matrices.
//!
//! Features are `n x c` (tokens by channels); projections are bias-free
//! `c x d_k` matrices applied on the right.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub type Matrix = DMatrix<f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AttentionError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("alpha {0} is outside [0, 1]")]
    Alpha(f64),
}

/// Token features of one frame: `n >= 1` rows, `c >= 1` columns, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeature(Matrix);

impl FrameFeature {
    pub fn new(tokens: Matrix) -> Result<Self, AttentionError> {
        if tokens.nrows() == 0 || tokens.ncols() == 0 {
            return Err(AttentionError::Shape(format!("feature is {}x{}", tokens.nrows(), tokens.ncols())));
        }
        if tokens.iter().any(|v| !v.is_finite()) {
            return Err(AttentionError::NonFinite("feature"));
        }
        Ok(Self(tokens))
    }

    pub fn tokens(&self) -> &Matrix {
        &self.0
    }

    pub fn into_tokens(self) -> Matrix {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn c(&self) -> usize {
        self.0.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSet {
    pub w_q: Matrix,
    pub w_k: Matrix,
    pub w_v: Matrix,
}

impl ProjectionSet {
    pub fn new(w_q: Matrix, w_k: Matrix, w_v: Matrix) -> Result<Self, AttentionError> {
        let c = w_q.nrows();
        let d = w_q.ncols();
        for (name, w) in [("W_K", &w_k), ("W_V", &w_v)] {
            if w.shape() != (c, d) {
                return Err(AttentionError::Shape(format!(
                    "{name} is {}x{}, W_Q is {c}x{d}",
                    w.nrows(),
                    w.ncols()
                )));
            }
        }
        if c == 0 || d == 0 {
            return Err(AttentionError::Shape("empty projection".into()));
        }
        if [&w_q, &w_k, &w_v].iter().any(|w| w.iter().any(|v| !v.is_finite())) {
            return Err(AttentionError::NonFinite("projection"));
        }
        Ok(Self { w_q, w_k, w_v })
    }

    pub fn c(&self) -> usize {
        self.w_q.nrows()
    }

    pub fn d_k(&self) -> usize {
        self.w_q.ncols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttentionConfig {
    /// Scaling dimension; logits are divided by `sqrt(d)`.
    pub d: usize,
    /// Weight of the current frame's keys in cross-frame attention.
    pub alpha: f64,
}

impl AttentionConfig {
    pub fn new(d: usize, alpha: f64) -> Result<Self, AttentionError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(AttentionError::Alpha(alpha));
        }
        if d == 0 {
            return Err(AttentionError::Shape("d must be positive".into()));
        }
        Ok(Self { d, alpha })
    }

    fn check(&self, p: &ProjectionSet) -> Result<(), AttentionError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(AttentionError::Alpha(self.alpha));
        }
        if self.d != p.d_k() {
            return Err(AttentionError::Shape(format!("d = {} but projections have d_k = {}", self.d, p.d_k())));
        }
        Ok(())
    }
}

/// Which attention frames after the first use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttentionMode {
    /// Every frame attends to itself only.
    SelfOnly,
    /// Keys and values from the first frame and the current frame.
    #[default]
    CrossFrame,
    /// Keys and values from the first frame only.
    FirstFrame,
}

/// Row-wise softmax with max subtraction.
pub fn softmax_rows(logits: &Matrix) -> Matrix {
    let mut out = logits.clone();
    for mut row in out.row_iter_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.apply(|v| *v = (*v - max).exp());
        let sum = row.sum();
        row /= sum;
    }
    out
}

/// `softmax(q k^T / sqrt(d)) v`
pub fn attend(q: &Matrix, k: &Matrix, v: &Matrix, d: usize) -> Matrix {
    let logits = (q * k.transpose()) / (d as f64).sqrt();
    softmax_rows(&logits) * v
}

fn check_channels(p: &ProjectionSet, features: &[&FrameFeature]) -> Result<(), AttentionError> {
    for f in features {
        if f.c() != p.c() {
            return Err(AttentionError::Shape(format!("feature has {} channels, projections expect {}", f.c(), p.c())));
        }
    }
    Ok(())
}

fn output(m: Matrix) -> Result<FrameFeature, AttentionError> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(AttentionError::NonFinite("attention output"));
    }
    Ok(FrameFeature(m))
}

fn vstack(top: &Matrix, bottom: &Matrix) -> Matrix {
    let (a, b, c) = (top.nrows(), bottom.nrows(), top.ncols());
    let mut out = Matrix::zeros(a + b, c);
    out.rows_mut(0, a).copy_from(top);
    out.rows_mut(a, b).copy_from(bottom);
    out
}

pub fn self_attention(f: &FrameFeature, p: &ProjectionSet, cfg: &AttentionConfig) -> Result<FrameFeature, AttentionError> {
    cfg.check(p)?;
    check_channels(p, &[f])?;
    let x = f.tokens();
    output(attend(&(x * &p.w_q), &(x * &p.w_k), &(x * &p.w_v), cfg.d))
}

/// Keys for frame `i`: `W_K` applied to the token concatenation `[F1; alpha * Fi]`.
pub fn cross_frame_keys(f1: &FrameFeature, fi: &FrameFeature, w_k: &Matrix, alpha: f64) -> Matrix {
    vstack(f1.tokens(), &(fi.tokens() * alpha)) * w_k
}

/// Values for frame `i`: `W_V` applied to `[F1; Fi]`.
pub fn cross_frame_values(f1: &FrameFeature, fi: &FrameFeature, w_v: &Matrix) -> Matrix {
    vstack(f1.tokens(), fi.tokens()) * w_v
}

/// Queries from `fi`; keys and values over the first frame's tokens followed
/// by `fi`'s, with `fi`'s key features scaled by `alpha`.
pub fn cross_frame_attention(
    f1: &FrameFeature,
    fi: &FrameFeature,
    p: &ProjectionSet,
    cfg: &AttentionConfig,
) -> Result<FrameFeature, AttentionError> {
    cfg.check(p)?;
    check_channels(p, &[f1, fi])?;
    let q = fi.tokens() * &p.w_q;
    let k = cross_frame_keys(f1, fi, &p.w_k, cfg.alpha);
    let v = cross_frame_values(f1, fi, &p.w_v);
    output(attend(&q, &k, &v, cfg.d))
}

/// Queries from `fi`, keys and values from `f1` alone.
pub fn first_frame_attention(
    f1: &FrameFeature,
    fi: &FrameFeature,
    p: &ProjectionSet,
    cfg: &AttentionConfig,
) -> Result<FrameFeature, AttentionError> {
    cfg.check(p)?;
    check_channels(p, &[f1, fi])?;
    let x1 = f1.tokens();
    output(attend(&(fi.tokens() * &p.w_q), &(x1 * &p.w_k), &(x1 * &p.w_v), cfg.d))
}

/// Attention for frame `index` (0-based) under `mode`; frame 0 always uses
/// self attention.
pub fn frame_attention(
    mode: AttentionMode,
    index: usize,
    first: &FrameFeature,
    current: &FrameFeature,
    p: &ProjectionSet,
    cfg: &AttentionConfig,
) -> Result<FrameFeature, AttentionError> {
    match (mode, index) {
        (_, 0) | (AttentionMode::SelfOnly, _) => self_attention(current, p, cfg),
        (AttentionMode::CrossFrame, _) => cross_frame_attention(first, current, p, cfg),
        (AttentionMode::FirstFrame, _) => first_frame_attention(first, current, p, cfg),
    }
}
