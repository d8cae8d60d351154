//! Two-layer graph convolutional network for node classification.

mod features;
mod network;

use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{normalized_adjacency, AdjacencyMode, Graph, NormalizedAdjacency};
use crate::prob::ProbMatrix;

pub use features::{neighbor_label_features, FeatureKind, FeatureMatrix};
pub use network::{infer_logits, Objective, Weights};

use network::{accuracy, backward, cross_entropy, forward, Dropout};

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GcnConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Drop probability applied to the inputs of both layers.
    pub dropout: f64,
    pub weight_decay: f64,
    /// Share of the labeled set held out for model selection; only used
    /// when at least 10 nodes are labeled. The kept epoch has the best
    /// validation accuracy, then the lowest validation loss.
    pub validation_fraction: f64,
    pub adjacency: AdjacencyMode,
    pub seed: u64,
}

impl Default for GcnConfig {
    fn default() -> Self {
        GcnConfig {
            hidden: 16,
            epochs: 200,
            learning_rate: 0.01,
            dropout: 0.6,
            weight_decay: 0.005,
            validation_fraction: 0.10,
            adjacency: AdjacencyMode::Symmetric,
            seed: 0,
        }
    }
}

impl GcnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 {
            return Err(invalid("hidden", "must be at least 1"));
        }
        if self.epochs == 0 {
            return Err(invalid("epochs", "must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(invalid("learning_rate", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(invalid("dropout", "must be in [0, 1)"));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(invalid("weight_decay", "must be nonnegative"));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(invalid("validation_fraction", "must be in [0, 1)"));
        }
        Ok(())
    }
}

/// One row of the training log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    /// Training loss of the dropout-perturbed pass used for the update.
    pub loss: f64,
    /// `None` when no validation split was carved.
    pub validation_accuracy: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    weights: Weights,
    adjacency: Arc<NormalizedAdjacency>,
    logits: Array2<f64>,
    log: Vec<EpochLog>,
    best_epoch: usize,
    validation: Vec<usize>,
}

impl TrainedModel {
    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn adjacency(&self) -> &NormalizedAdjacency {
        &self.adjacency
    }

    pub fn log(&self) -> &[EpochLog] {
        &self.log
    }

    /// Epoch whose weights were kept (1-based).
    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }

    /// Labeled nodes held out for model selection.
    pub fn validation_nodes(&self) -> &[usize] {
        &self.validation
    }

    /// Class probabilities with dropout disabled.
    pub fn predict_proba(&self) -> ProbMatrix {
        ProbMatrix::softmax(self.logits.view())
    }

    /// Pre-softmax outputs, one `C`-dimensional row per node.
    pub fn representations(&self) -> ArrayView2<'_, f64> {
        self.logits.view()
    }

    /// Writes both weight matrices as headerless CSV, `w0` first, separated
    /// by a blank line.
    pub fn write_weights_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for (k, m) in [&self.weights.w0, &self.weights.w1].into_iter().enumerate() {
            if k > 0 {
                writeln!(out)?;
            }
            for row in m.rows() {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        Ok(())
    }
}

/// Trains on `labels` (`(node, class)` pairs) over the normalized adjacency
/// of `g`.
pub fn train(
    g: &Graph,
    x0: &FeatureMatrix,
    labels: &[(usize, usize)],
    num_classes: usize,
    cfg: &GcnConfig,
) -> Result<TrainedModel> {
    let adj = Arc::new(normalized_adjacency(g, cfg.adjacency));
    train_with_adjacency(adj, x0, labels, num_classes, cfg)
}

/// [`train`] with a prebuilt propagation operator, so callers can reuse it
/// across active-learning rounds.
pub fn train_with_adjacency(
    adjacency: Arc<NormalizedAdjacency>,
    x0: &FeatureMatrix,
    labels: &[(usize, usize)],
    num_classes: usize,
    cfg: &GcnConfig,
) -> Result<TrainedModel> {
    fit(adjacency, x0, labels, num_classes, cfg, None)
}

/// [`train_with_adjacency`] starting from `init` instead of a fresh
/// initialization.
pub fn train_warm(
    adjacency: Arc<NormalizedAdjacency>,
    x0: &FeatureMatrix,
    labels: &[(usize, usize)],
    num_classes: usize,
    cfg: &GcnConfig,
    init: &Weights,
) -> Result<TrainedModel> {
    fit(adjacency, x0, labels, num_classes, cfg, Some(init))
}

fn fit(
    adjacency: Arc<NormalizedAdjacency>,
    x0: &FeatureMatrix,
    labels: &[(usize, usize)],
    num_classes: usize,
    cfg: &GcnConfig,
    init: Option<&Weights>,
) -> Result<TrainedModel> {
    cfg.validate()?;
    if labels.is_empty() {
        return Err(Error::EmptyInput("training labels"));
    }
    if adjacency.mode() != cfg.adjacency {
        return Err(invalid("adjacency", "operator mode differs from config"));
    }
    let n = adjacency.symmetric_part().rows();
    if x0.rows() != n {
        return Err(Error::DimensionMismatch(format!("{} feature rows for {n} nodes", x0.rows())));
    }
    for &(i, y) in labels {
        if i >= n {
            return Err(Error::NodeOutOfRange { index: i, n });
        }
        if y >= num_classes {
            return Err(Error::ClassOutOfRange { class: y, num_classes });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let channels = adjacency.channels().len();
    let mut weights = Weights::glorot(x0.cols(), cfg.hidden, channels, num_classes, &mut rng);
    if let Some(init) = init {
        if init.w0.raw_dim() != weights.w0.raw_dim() || init.w1.raw_dim() != weights.w1.raw_dim() {
            return Err(Error::DimensionMismatch("initial weights do not match the model shape".into()));
        }
        weights = init.clone();
    }

    let mut shuffled = labels.to_vec();
    let n_val = if labels.len() >= 10 {
        ((cfg.validation_fraction * labels.len() as f64).floor() as usize).max(1)
    } else {
        0
    };
    let (train_rows, val_rows) = if n_val > 0 {
        shuffled.shuffle(&mut rng);
        let val = shuffled.split_off(shuffled.len() - n_val);
        (shuffled, val)
    } else {
        (shuffled, Vec::new())
    };

    let mut adam = Adam::new(&weights, cfg.learning_rate);
    let mut log = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(f64, f64, usize, Weights)> = None;
    let x = x0.matrix();

    for epoch in 1..=cfg.epochs {
        let cache = forward(
            &adjacency,
            x,
            &weights,
            Some(Dropout {
                rate: cfg.dropout,
                rng: &mut rng,
            }),
        );
        let (ce, grad_logits) = cross_entropy(&cache.logits, &train_rows);
        let loss = ce + 0.5 * cfg.weight_decay * weights.squared_norm();
        if !loss.is_finite() {
            return Err(Error::NanLoss { epoch });
        }
        let grads = backward(&adjacency, &cache, &weights, &grad_logits, cfg.weight_decay);
        adam.step(&mut weights, &grads);

        let validation_accuracy = if val_rows.is_empty() {
            None
        } else {
            let logits = infer_logits(&adjacency, x, &weights);
            let acc = accuracy(&logits, &val_rows);
            let val_loss = cross_entropy(&logits, &val_rows).0;
            // ties on accuracy go to the lower validation loss, then the earlier epoch
            if best.as_ref().is_none_or(|&(b, l, _, _)| acc > b || (acc == b && val_loss < l)) {
                best = Some((acc, val_loss, epoch, weights.clone()));
            }
            Some(acc)
        };
        log.push(EpochLog {
            epoch,
            loss,
            validation_accuracy,
        });
    }

    let (best_epoch, weights) = match best {
        Some((_, _, epoch, w)) => (epoch, w),
        None => (cfg.epochs, weights),
    };
    let logits = infer_logits(&adjacency, x, &weights);
    if logits.iter().any(|v| !v.is_finite()) {
        return Err(Error::NanLoss { epoch: best_epoch });
    }
    Ok(TrainedModel {
        weights,
        adjacency,
        logits,
        log,
        best_epoch,
        validation: val_rows.iter().map(|&(i, _)| i).collect(),
    })
}

/// Adaptive-moment optimizer state.
struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: i32,
    m: Weights,
    v: Weights,
}

impl Adam {
    fn new(like: &Weights, lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: like.zeros_like(),
            v: like.zeros_like(),
        }
    }

    fn step(&mut self, w: &mut Weights, g: &Weights) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        for (w, (g, (m, v))) in [
            (&mut w.w0, (&g.w0, (&mut self.m.w0, &mut self.v.w0))),
            (&mut w.w1, (&g.w1, (&mut self.m.w1, &mut self.v.w1))),
        ] {
            ndarray::Zip::from(w).and(g).and(m).and(v).for_each(|w, &g, m, v| {
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                *w -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two 5-cliques joined by a single edge.
    fn barbell() -> Graph {
        let mut edges = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in i + 1..5 {
                    edges.push((base + i, base + j));
                }
            }
        }
        edges.push((4, 5));
        Graph::from_edges(10, &edges).unwrap()
    }

    fn fixture() -> (Graph, FeatureMatrix, Vec<(usize, usize)>) {
        let g = barbell();
        let labels = vec![(0, 0), (9, 1)];
        let mut known = vec![None; 10];
        for &(i, c) in &labels {
            known[i] = Some(c);
        }
        let x = neighbor_label_features(&g, &known, 2, false).unwrap();
        (g, x, labels)
    }

    #[test]
    fn separable_fixture_fits_and_classifies() {
        let (g, x, labels) = fixture();
        let m = train(&g, &x, &labels, 2, &GcnConfig::default()).unwrap();
        let p = m.predict_proba();
        for &(i, y) in &labels {
            assert_eq!(p.argmax(i), y);
        }
        for row in p.view().rows() {
            assert!((row.sum() - 1.0).abs() < 1e-6);
        }
        assert_eq!(m.representations().dim(), (10, 2));
        assert_eq!(m.best_epoch(), 200);
    }

    #[test]
    fn same_seed_same_weights() {
        let (g, x, labels) = fixture();
        let cfg = GcnConfig {
            seed: 11,
            ..GcnConfig::default()
        };
        let a = train(&g, &x, &labels, 2, &cfg).unwrap();
        let b = train(&g, &x, &labels, 2, &cfg).unwrap();
        assert_eq!(a.weights(), b.weights());
        let c = train(&g, &x, &labels, 2, &GcnConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a.weights(), c.weights());
    }

    #[test]
    fn softmax_of_representations_is_proba() {
        let (g, x, labels) = fixture();
        let m = train(&g, &x, &labels, 2, &GcnConfig::default()).unwrap();
        let p = ProbMatrix::softmax(m.representations());
        assert_eq!(p, m.predict_proba());
    }

    #[test]
    fn validation_split_only_from_ten_labels() {
        let (g, x, _) = fixture();
        let many: Vec<(usize, usize)> = (0..10).map(|i| (i, usize::from(i >= 5))).collect();
        let m = train(&g, &x, &many, 2, &GcnConfig::default()).unwrap();
        assert_eq!(m.validation_nodes().len(), 1);
        assert!(m.log().iter().all(|e| e.validation_accuracy.is_some()));
        let few = &many[..9];
        let m = train(&g, &x, few, 2, &GcnConfig::default()).unwrap();
        assert!(m.validation_nodes().is_empty());
    }

    #[test]
    fn rejects_bad_inputs() {
        let (g, x, labels) = fixture();
        assert!(matches!(
            train(&g, &x, &[], 2, &GcnConfig::default()),
            Err(Error::EmptyInput(_))
        ));
        assert!(train(&g, &x, &[(0, 5)], 2, &GcnConfig::default()).is_err());
        let bad = GcnConfig {
            hidden: 0,
            ..GcnConfig::default()
        };
        assert!(train(&g, &x, &labels, 2, &bad).is_err());
    }

    #[test]
    fn weights_dump_has_one_line_per_row() {
        let (g, x, labels) = fixture();
        let cfg = GcnConfig {
            hidden: 3,
            epochs: 2,
            ..GcnConfig::default()
        };
        let m = train(&g, &x, &labels, 2, &cfg).unwrap();
        let mut buf = Vec::new();
        m.write_weights_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2 + 1 + 3);
    }
}
