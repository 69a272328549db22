//! Control residual stacks and their combination.

use super::attention::Matrix;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ResidualError {
    #[error("residual stacks have {0} and {1} levels")]
    LevelCount(usize, usize),
    #[error("residual level {level}: {a:?} vs {b:?}")]
    Shape { level: usize, a: (usize, usize), b: (usize, usize) },
}

/// Per-level residuals a control branch injects into the denoiser.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualStack {
    pub levels: Vec<Matrix>,
}

impl ResidualStack {
    pub fn new(levels: Vec<Matrix>) -> Self {
        Self { levels }
    }

    /// A stack of zeros shaped like `self`.
    pub fn zeros_like(&self) -> Self {
        Self { levels: self.levels.iter().map(|l| Matrix::zeros(l.nrows(), l.ncols())).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { levels: self.levels.iter().map(|l| l * s).collect() }
    }
}

/// Elementwise sum of two stacks, level by level.
pub fn combine_control_residuals(edge: &ResidualStack, depth: &ResidualStack) -> Result<ResidualStack, ResidualError> {
    if edge.levels.len() != depth.levels.len() {
        return Err(ResidualError::LevelCount(edge.levels.len(), depth.levels.len()));
    }
    edge.levels
        .iter()
        .zip(&depth.levels)
        .enumerate()
        .map(|(level, (a, b))| {
            if a.shape() != b.shape() {
                Err(ResidualError::Shape { level, a: a.shape(), b: b.shape() })
            } else {
                Ok(a + b)
            }
        })
        .collect::<Result<_, _>>()
        .map(ResidualStack::new)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_identity_and_errors() {
        let a = ResidualStack::new(vec![Matrix::from_fn(2, 3, |i, j| (i * 3 + j) as f64), Matrix::from_element(1, 1, 0.5)]);
        assert_eq!(combine_control_residuals(&a, &a.zeros_like()).unwrap(), a);
        let short = ResidualStack::new(vec![Matrix::zeros(2, 3)]);
        assert_eq!(combine_control_residuals(&a, &short), Err(ResidualError::LevelCount(2, 1)));
        let wrong = ResidualStack::new(vec![Matrix::zeros(2, 3), Matrix::zeros(2, 1)]);
        let err = combine_control_residuals(&a, &wrong).unwrap_err();
        assert!(matches!(err, ResidualError::Shape { level: 1, .. }));
        assert!(err.to_string().starts_with("residual level 1"));
    }
}
