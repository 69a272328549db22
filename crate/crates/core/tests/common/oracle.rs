//! Direct-summation references, written with plain loops over `Vec`s.

use motionforge::synthesis::Matrix;

pub type Rows = Vec<Vec<f64>>;

pub fn rows(m: &Matrix) -> Rows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn matmul(a: &Rows, b: &Rows) -> Rows {
    let inner = b.len();
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner);
            (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()
        })
        .collect()
}

/// For every query: logits against every key, stable softmax, weighted sum
/// of values.
pub fn attention(q: &Rows, k: &Rows, v: &Rows, d: usize) -> Rows {
    let scale = (d as f64).sqrt();
    q.iter()
        .map(|qi| {
            let logits: Vec<f64> =
                k.iter().map(|kj| qi.iter().zip(kj).map(|(a, b)| a * b).sum::<f64>() / scale).collect();
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
            let total: f64 = weights.iter().sum();
            (0..v[0].len()).map(|c| weights.iter().zip(v).map(|(w, vj)| w * vj[c]).sum::<f64>() / total).collect()
        })
        .collect()
}

pub fn self_attention(f: &Rows, wq: &Rows, wk: &Rows, wv: &Rows, d: usize) -> Rows {
    attention(&matmul(f, wq), &matmul(f, wk), &matmul(f, wv), d)
}

/// Keys over `[F1; alpha * Fi]`, values over `[F1; Fi]`, queries from `Fi`.
pub fn cross_frame(f1: &Rows, fi: &Rows, wq: &Rows, wk: &Rows, wv: &Rows, d: usize, alpha: f64) -> Rows {
    let scaled: Rows = fi.iter().map(|r| r.iter().map(|x| alpha * x).collect()).collect();
    let key_in: Rows = f1.iter().chain(&scaled).cloned().collect();
    let value_in: Rows = f1.iter().chain(fi).cloned().collect();
    attention(&matmul(fi, wq), &matmul(&key_in, wk), &matmul(&value_in, wv), d)
}

pub fn first_frame(f1: &Rows, fi: &Rows, wq: &Rows, wk: &Rows, wv: &Rows, d: usize) -> Rows {
    attention(&matmul(fi, wq), &matmul(f1, wk), &matmul(f1, wv), d)
}

pub fn max_abs_diff(a: &Matrix, b: &Rows) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.len(), b[0].len()));
    let mut worst = 0.0f64;
    for (i, row) in b.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((a[(i, j)] - v).abs());
        }
    }
    worst
}
