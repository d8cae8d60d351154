use ndarray::{Array2, ArrayView2};

use super::ScoreVector;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Neighbor-averaged class probabilities. Rows of isolated nodes are all
/// zero, so every uncertainty measure of such a row is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionalProbMatrix(Array2<f64>);

impl RegionalProbMatrix {
    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }
}

/// Region of `i`: its undirected neighbors, plus `i` itself when
/// `include_self` is set. Empty for isolated nodes without self.
fn region(g: &Graph, i: usize, include_self: bool) -> impl Iterator<Item = usize> + '_ {
    let me = if include_self && !g.neighbors(i).is_empty() { Some(i) } else { None };
    g.neighbors(i).iter().copied().chain(me)
}

/// Row `i` is the mean of `p` over the neighbors of `i`.
pub fn regional_average_proba(g: &Graph, p: ArrayView2<f64>, include_self: bool) -> Result<RegionalProbMatrix> {
    let n = g.node_count();
    if p.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} probability rows for {n} nodes",
            p.nrows()
        )));
    }
    let mut out = Array2::zeros(p.raw_dim());
    for i in 0..n {
        let mut count = 0usize;
        let mut row = out.row_mut(i);
        for j in region(g, i, include_self) {
            row += &p.row(j);
            count += 1;
        }
        if count > 0 {
            row /= count as f64;
        }
    }
    Ok(RegionalProbMatrix(out))
}

/// `out(i)` is the mean of `s` over the neighbors of `i`; isolated nodes
/// get 0.
pub fn regional_average_scores(g: &Graph, s: &ScoreVector, include_self: bool) -> Result<ScoreVector> {
    let n = g.node_count();
    if s.len() != n {
        return Err(Error::DimensionMismatch(format!("{} scores for {n} nodes", s.len())));
    }
    let values = (0..n)
        .map(|i| {
            let (sum, count) = region(g, i, include_self).fold((0.0, 0usize), |(a, c), j| (a + s[j], c + 1));
            if count == 0 {
                0.0
            } else {
                sum / count as f64
            }
        })
        .collect();
    Ok(ScoreVector::new(values))
}
