use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{CsrMatrix, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    /// Per-class counts of labeled neighbors.
    NeighborLabels,
    /// Static document features (0/1 or TF-IDF).
    BagOfWords,
}

/// Sparse N×F input matrix of the first GCN layer.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    kind: FeatureKind,
    data: CsrMatrix,
}

impl FeatureMatrix {
    pub fn new(kind: FeatureKind, data: CsrMatrix) -> Result<Self> {
        if data.values().iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(invalid("features", "entries must be finite and nonnegative"));
        }
        Ok(FeatureMatrix { kind, data })
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.data.rows()
    }

    pub fn cols(&self) -> usize {
        self.data.cols()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.data
    }

    /// Copy restricted to `rows`, in that order.
    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        let mut triplets = Vec::new();
        for (new, &old) in rows.iter().enumerate() {
            let (idx, vals) = self.data.row(old);
            triplets.extend(idx.iter().zip(vals).map(|(&c, &v)| (new, c, v)));
        }
        FeatureMatrix {
            kind: self.kind,
            data: CsrMatrix::from_triplets(rows.len(), self.cols(), &triplets),
        }
    }
}

/// Row `i`, column `c` counts the undirected neighbors of `i` whose known
/// class is `c`. With `normalize`, each nonzero row is divided by its sum.
pub fn neighbor_label_features(
    g: &Graph,
    known: &[Option<usize>],
    num_classes: usize,
    normalize: bool,
) -> Result<FeatureMatrix> {
    let n = g.node_count();
    if known.len() != n {
        return Err(Error::DimensionMismatch(format!("{} label slots for {n} nodes", known.len())));
    }
    if let Some(&c) = known.iter().flatten().find(|&&c| c >= num_classes) {
        return Err(Error::ClassOutOfRange { class: c, num_classes });
    }
    let mut triplets = Vec::new();
    let mut counts = vec![0.0; num_classes];
    for i in 0..n {
        counts.iter_mut().for_each(|v| *v = 0.0);
        for &j in g.neighbors(i) {
            if let Some(c) = known[j] {
                counts[c] += 1.0;
            }
        }
        let total: f64 = counts.iter().sum();
        for (c, &v) in counts.iter().enumerate() {
            if v > 0.0 {
                triplets.push((i, c, if normalize { v / total } else { v }));
            }
        }
    }
    FeatureMatrix::new(
        FeatureKind::NeighborLabels,
        CsrMatrix::from_triplets(n, num_classes, &triplets),
    )
}
