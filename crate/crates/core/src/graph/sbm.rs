use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphBuilder};
use crate::error::{invalid, Result};

/// Parameters of a planted-partition stochastic block model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmParams {
    pub block_sizes: Vec<usize>,
    pub p_within: f64,
    pub p_between: f64,
    /// Directed: every ordered pair is drawn independently. Undirected: each
    /// unordered pair is drawn once and, if present, stored in both
    /// directions.
    pub directed: bool,
    pub seed: u64,
}

/// Samples an SBM graph. Node `i` is named by its index and its label is its
/// block index.
pub fn sbm_generate(params: &SbmParams) -> Result<(Graph, Vec<usize>)> {
    for (name, p) in [("p_within", params.p_within), ("p_between", params.p_between)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(name, format!("probability {p} outside [0, 1]")));
        }
    }
    if params.block_sizes.is_empty() || params.block_sizes.contains(&0) {
        return Err(invalid("block_sizes", "need at least one block, each of size >= 1"));
    }
    let labels: Vec<usize> = params
        .block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
        .collect();
    let n = labels.len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut builder = GraphBuilder::new();
    for i in 0..n {
        builder.add_node(&i.to_string());
    }
    for i in 0..n {
        let start = if params.directed { 0 } else { i + 1 };
        for j in start..n {
            if i == j {
                continue;
            }
            let p = if labels[i] == labels[j] {
                params.p_within
            } else {
                params.p_between
            };
            if rng.random_bool(p) {
                builder.add_edge_indices(i, j);
                if !params.directed {
                    builder.add_edge_indices(j, i);
                }
            }
        }
    }
    Ok((builder.build().0, labels))
}
