use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{CsrMatrix, Graph};

/// How the GCN propagation operator is derived from the adjacency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdjacencyMode {
    /// `D̃^{-1/2}(A + Aᵀ + I)D̃^{-1/2}`, direction discarded.
    #[default]
    Symmetric,
    /// Symmetric part plus an anti-symmetric channel that keeps direction.
    DirectedSplit,
}

/// Normalized propagation operator(s) for the GCN.
#[derive(Debug, Clone)]
pub enum NormalizedAdjacency {
    Symmetric(CsrMatrix),
    DirectedSplit {
        symmetric: CsrMatrix,
        antisymmetric: CsrMatrix,
    },
}

impl NormalizedAdjacency {
    pub fn mode(&self) -> AdjacencyMode {
        match self {
            NormalizedAdjacency::Symmetric(_) => AdjacencyMode::Symmetric,
            NormalizedAdjacency::DirectedSplit { .. } => AdjacencyMode::DirectedSplit,
        }
    }

    /// The propagation channels in layer order: one for symmetric mode, two
    /// (symmetric, anti-symmetric) for directed-split.
    pub fn channels(&self) -> Vec<&CsrMatrix> {
        match self {
            NormalizedAdjacency::Symmetric(s) => vec![s],
            NormalizedAdjacency::DirectedSplit {
                symmetric,
                antisymmetric,
            } => vec![symmetric, antisymmetric],
        }
    }

    pub fn symmetric_part(&self) -> &CsrMatrix {
        match self {
            NormalizedAdjacency::Symmetric(s) => s,
            NormalizedAdjacency::DirectedSplit { symmetric, .. } => symmetric,
        }
    }
}

/// Builds the GCN propagation operator.
///
/// With `d̃ᵢ = deg(i) + 1` on the undirected view, the symmetric part is
/// `S = D̃^{-1/2}(clip(A + Aᵀ) + I)D̃^{-1/2}` and the anti-symmetric part is
/// `K = D̃^{-1/2}(A − Aᵀ)D̃^{-1/2}`. `K` vanishes when `A = Aᵀ`.
pub fn normalized_adjacency(g: &Graph, mode: AdjacencyMode) -> NormalizedAdjacency {
    let n = g.node_count();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|i| 1.0 / ((g.undirected_degree(i) + 1) as f64).sqrt())
        .collect();
    let mut sym = Vec::with_capacity(n + 2 * g.undirected_edge_count());
    for i in 0..n {
        sym.push((i, i, inv_sqrt[i] * inv_sqrt[i]));
        for &j in g.neighbors(i) {
            sym.push((i, j, inv_sqrt[i] * inv_sqrt[j]));
        }
    }
    let symmetric = CsrMatrix::from_triplets(n, n, &sym);
    match mode {
        AdjacencyMode::Symmetric => NormalizedAdjacency::Symmetric(symmetric),
        AdjacencyMode::DirectedSplit => {
            let mut anti = Vec::new();
            for &(s, d) in g.edges() {
                if g.has_edge(d, s) {
                    continue;
                }
                let w = inv_sqrt[s] * inv_sqrt[d];
                anti.push((s, d, w));
                anti.push((d, s, -w));
            }
            NormalizedAdjacency::DirectedSplit {
                symmetric,
                antisymmetric: CsrMatrix::from_triplets(n, n, &anti),
            }
        }
    }
}

/// Row-stochastic random-walk operator `Ā = D⁻¹A` over out-edges. Rows of
/// dangling nodes (out-degree 0) are uniform `1/N`.
#[derive(Debug, Clone)]
pub struct RandomWalkMatrix {
    n: usize,
    /// Non-dangling rows only; dangling rows are empty here.
    walk: CsrMatrix,
    dangling: Vec<usize>,
}

impl RandomWalkMatrix {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dangling(&self) -> &[usize] {
        &self.dangling
    }

    pub fn is_dangling(&self, i: usize) -> bool {
        self.dangling.binary_search(&i).is_ok()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.is_dangling(i) {
            1.0 / self.n as f64
        } else {
            self.walk.get(i, j)
        }
    }

    /// `Āᵀ x`.
    pub fn transpose_mul(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let teleport: f64 = self.dangling.iter().map(|&i| x[i]).sum::<f64>() / self.n as f64;
        let mut y = vec![teleport; self.n];
        for (i, &xi) in x.iter().enumerate() {
            let (idx, vals) = self.walk.row(i);
            for (&j, &w) in idx.iter().zip(vals) {
                y[j] += w * xi;
            }
        }
        y
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut m = self.walk.to_dense();
        let u = 1.0 / self.n as f64;
        for &i in &self.dangling {
            m.row_mut(i).fill(u);
        }
        m
    }
}

pub fn random_walk_matrix(g: &Graph) -> RandomWalkMatrix {
    let n = g.node_count();
    let mut triplets = Vec::with_capacity(g.edge_count());
    let mut dangling = Vec::new();
    for i in 0..n {
        let out = g.out_neighbors(i);
        if out.is_empty() {
            dangling.push(i);
            continue;
        }
        let w = 1.0 / out.len() as f64;
        triplets.extend(out.iter().map(|&j| (i, j, w)));
    }
    RandomWalkMatrix {
        n,
        walk: CsrMatrix::from_triplets(n, n, &triplets),
        dangling,
    }
}
