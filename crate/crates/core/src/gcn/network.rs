//! Two-layer GCN forward and backward passes.
//!
//! With propagation channels `A₁..A_m` (one for symmetric mode; symmetric
//! and anti-symmetric parts for directed-split):
//!
//! ```text
//! Z₁ = [A₁·X·W₀ | … | A_m·X·W₀]        N × m·h
//! H₁ = ReLU(Z₁)
//! logits = Σ_c A_c·H₁·W₁               N × C,  W₁: m·h × C
//! ```
//!
//! The loss is the mean cross-entropy over training rows plus
//! `wd/2·(‖W₀‖² + ‖W₁‖²)`.

use ndarray::{s, Array2, Axis, Zip};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{CsrMatrix, NormalizedAdjacency};

/// Layer weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    /// F × h.
    pub w0: Array2<f64>,
    /// (channels·h) × C.
    pub w1: Array2<f64>,
}

impl Weights {
    /// Glorot-uniform initialization.
    pub fn glorot<R: Rng + ?Sized>(features: usize, hidden: usize, channels: usize, classes: usize, rng: &mut R) -> Self {
        let mut init = |rows: usize, cols: usize| {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-limit..limit))
        };
        let w0 = init(features, hidden);
        let w1 = init(hidden * channels, classes);
        Weights { w0, w1 }
    }

    pub fn zeros_like(&self) -> Self {
        Weights {
            w0: Array2::zeros(self.w0.raw_dim()),
            w1: Array2::zeros(self.w1.raw_dim()),
        }
    }

    pub fn squared_norm(&self) -> f64 {
        self.w0.iter().chain(self.w1.iter()).map(|v| v * v).sum()
    }

    pub fn hidden(&self) -> usize {
        self.w0.ncols()
    }
}

/// Dropout settings for one forward pass: drop probability and the stream
/// the masks are drawn from.
pub(crate) struct Dropout<'r, R: Rng + ?Sized> {
    pub rate: f64,
    pub rng: &'r mut R,
}

pub(crate) struct ForwardCache {
    x: CsrMatrix,
    z1: Array2<f64>,
    /// H₁ after dropout; scaled by `1/keep` where kept.
    h1: Array2<f64>,
    /// Per-entry dropout multiplier of H₁ (0 or `1/keep`), if dropout ran.
    h1_mask: Option<Array2<f64>>,
    pub logits: Array2<f64>,
}

fn dropout_sparse<R: Rng + ?Sized>(x: &CsrMatrix, rate: f64, rng: &mut R) -> CsrMatrix {
    let keep = 1.0 - rate;
    let mut out = x.clone();
    for v in out.values_mut() {
        *v = if rng.random::<f64>() < keep { *v / keep } else { 0.0 };
    }
    out
}

pub(crate) fn forward<R: Rng + ?Sized>(
    adj: &NormalizedAdjacency,
    x: &CsrMatrix,
    w: &Weights,
    mut dropout: Option<Dropout<'_, R>>,
) -> ForwardCache {
    let channels = adj.channels();
    let h = w.hidden();
    let x = match dropout.as_mut() {
        Some(d) if d.rate > 0.0 => dropout_sparse(x, d.rate, d.rng),
        _ => x.clone(),
    };
    let p0 = x.mul_dense(w.w0.view());
    let n = x.rows();
    let mut z1 = Array2::zeros((n, h * channels.len()));
    for (c, a) in channels.iter().enumerate() {
        z1.slice_mut(s![.., c * h..(c + 1) * h]).assign(&a.mul_dense(p0.view()));
    }
    let mut h1 = z1.mapv(|v| v.max(0.0));
    let h1_mask = match dropout.as_mut() {
        Some(d) if d.rate > 0.0 => {
            let keep = 1.0 - d.rate;
            let mask = Array2::from_shape_simple_fn(h1.raw_dim(), || {
                if d.rng.random::<f64>() < keep {
                    1.0 / keep
                } else {
                    0.0
                }
            });
            h1 *= &mask;
            Some(mask)
        }
        _ => None,
    };
    let p1 = h1.dot(&w.w1);
    let mut logits = Array2::zeros((n, w.w1.ncols()));
    for a in &channels {
        logits += &a.mul_dense(p1.view());
    }
    ForwardCache {
        x,
        z1,
        h1,
        h1_mask,
        logits,
    }
}

/// Mean cross-entropy over `train` rows and its gradient w.r.t. the logits.
pub(crate) fn cross_entropy(logits: &Array2<f64>, train: &[(usize, usize)]) -> (f64, Array2<f64>) {
    let mut grad = Array2::zeros(logits.raw_dim());
    let scale = 1.0 / train.len() as f64;
    let mut loss = 0.0;
    for &(i, y) in train {
        let row = logits.row(i);
        let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let lse = m + row.iter().map(|&v| (v - m).exp()).sum::<f64>().ln();
        loss += lse - row[y];
        let mut g = grad.row_mut(i);
        Zip::from(&mut g).and(&row).for_each(|g, &v| *g += (v - lse).exp() * scale);
        g[y] -= scale;
    }
    (loss * scale, grad)
}

pub(crate) fn backward(
    adj: &NormalizedAdjacency,
    cache: &ForwardCache,
    w: &Weights,
    grad_logits: &Array2<f64>,
    weight_decay: f64,
) -> Weights {
    let channels = adj.channels();
    let h = w.hidden();
    let mut d_p1 = Array2::zeros(grad_logits.raw_dim());
    for a in &channels {
        d_p1 += &a.transpose_mul_dense(grad_logits.view());
    }
    let mut d_w1 = cache.h1.t().dot(&d_p1);
    d_w1.scaled_add(weight_decay, &w.w1);

    let mut d_z1 = d_p1.dot(&w.w1.t());
    if let Some(mask) = &cache.h1_mask {
        d_z1 *= mask;
    }
    Zip::from(&mut d_z1).and(&cache.z1).for_each(|d, &z| {
        if z <= 0.0 {
            *d = 0.0;
        }
    });
    let mut d_p0 = Array2::zeros((d_z1.nrows(), h));
    for (c, a) in channels.iter().enumerate() {
        let block = d_z1.slice(s![.., c * h..(c + 1) * h]);
        d_p0 += &a.transpose_mul_dense(block);
    }
    let mut d_w0 = cache.x.transpose_mul_dense(d_p0.view());
    d_w0.scaled_add(weight_decay, &w.w0);
    Weights { w0: d_w0, w1: d_w1 }
}

/// Dropout-free training objective, exposed for gradient checking and
/// model inspection.
pub struct Objective<'a> {
    pub adjacency: &'a NormalizedAdjacency,
    pub features: &'a CsrMatrix,
    pub train: &'a [(usize, usize)],
    pub weight_decay: f64,
}

impl Objective<'_> {
    pub fn loss(&self, w: &Weights) -> f64 {
        let cache = forward::<ChaCha8Rng>(self.adjacency, self.features, w, None);
        cross_entropy(&cache.logits, self.train).0 + 0.5 * self.weight_decay * w.squared_norm()
    }

    pub fn loss_and_gradient(&self, w: &Weights) -> (f64, Weights) {
        let cache = forward::<ChaCha8Rng>(self.adjacency, self.features, w, None);
        let (ce, g) = cross_entropy(&cache.logits, self.train);
        let grads = backward(self.adjacency, &cache, w, &g, self.weight_decay);
        (ce + 0.5 * self.weight_decay * w.squared_norm(), grads)
    }
}

/// Logits of a dropout-free forward pass.
pub fn infer_logits(adj: &NormalizedAdjacency, x: &CsrMatrix, w: &Weights) -> Array2<f64> {
    forward::<ChaCha8Rng>(adj, x, w, None).logits
}

/// Row-argmax accuracy of `logits` on `rows`.
pub(crate) fn accuracy(logits: &Array2<f64>, rows: &[(usize, usize)]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let hits = rows
        .iter()
        .filter(|&&(i, y)| crate::prob::argmax_row(logits.index_axis(Axis(0), i)) == y)
        .count();
    hits as f64 / rows.len() as f64
}
