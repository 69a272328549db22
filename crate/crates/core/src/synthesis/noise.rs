//! Seeded initial noise shared by every frame.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use super::attention::Matrix;

/// Shape of one frame's latent: a `height x width` grid of `channels`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LatentShape {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl LatentShape {
    pub fn tokens(&self) -> usize {
        self.height * self.width
    }

    pub fn len(&self) -> usize {
        self.tokens() * self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Standard-normal tensors from ChaCha20 seeded with `seed`, one per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseBatch {
    pub shape: LatentShape,
    pub frames: Vec<Matrix>,
}

/// Draw one `tokens x channels` tensor (row-major order) and repeat it for
/// all `frame_count` frames.
pub fn shared_noise_batch(seed: u64, frame_count: usize, shape: LatentShape) -> NoiseBatch {
    assert!(frame_count >= 1, "frame_count must be at least 1");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(shape.len());
    for _ in 0..shape.len() {
        values.push(StandardNormal.sample(&mut rng));
    }
    let frame = Matrix::from_row_slice(shape.tokens(), shape.channels, &values);
    NoiseBatch { shape, frames: vec![frame; frame_count] }
}

/// Little-endian f64 bytes in row-major order.
pub fn tensor_bytes(m: &Matrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(m.len() * 8);
    for row in m.row_iter() {
        for v in row.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

impl NoiseBatch {
    pub fn frame_bytes(&self, i: usize) -> Vec<u8> {
        tensor_bytes(&self.frames[i])
    }

    /// SHA-256 over every frame's bytes.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for f in &self.frames {
            h.update(tensor_bytes(f));
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_byte_identical() {
        let b = shared_noise_batch(7, 5, LatentShape { height: 3, width: 4, channels: 2 });
        assert_eq!(b.frames.len(), 5);
        for i in 1..5 {
            assert_eq!(b.frame_bytes(i), b.frame_bytes(0));
        }
        assert_eq!(b.frames[0].shape(), (12, 2));
    }

    #[test]
    fn seed_matters() {
        let s = LatentShape { height: 2, width: 2, channels: 1 };
        assert_eq!(shared_noise_batch(1, 1, s), shared_noise_batch(1, 1, s));
        assert_ne!(shared_noise_batch(1, 1, s), shared_noise_batch(2, 1, s));
    }
}
