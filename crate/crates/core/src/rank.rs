//! PageRank and adaptive PageRank (APR).
//!
//! PageRank is the fixed point of `x = γ·Āᵀx + (1 − γ)/N` where `Ā` is the
//! random-walk matrix of [`random_walk_matrix`]. APR solves the same
//! equation on the unlabeled rows only, with labeled entries pinned to
//! their PageRank values:
//!
//! ```text
//! APR(U) = γ·Āᵀ[U, L]·PR(L) + γ·Āᵀ[U, U]·APR(U) + (1 − γ)/N
//! ```
//!
//! Both are solved by fixed-point iteration, which contracts with ratio `γ`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{random_walk_matrix, Graph, RandomWalkMatrix};

pub const DEFAULT_GAMMA: f64 = 0.85;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankKind {
    PageRank,
    Adaptive,
}

/// Strictly positive per-node scores produced by [`pagerank`] or
/// [`adaptive_pagerank`].
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    values: Vec<f64>,
    gamma: f64,
    kind: RankKind,
}

impl RankVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kind(&self) -> RankKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Solver settings shared by [`pagerank`] and [`adaptive_pagerank`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankParams {
    pub gamma: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for RankParams {
    fn default() -> Self {
        RankParams {
            gamma: DEFAULT_GAMMA,
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

impl RankParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(invalid("gamma", format!("{} not in (0, 1)", self.gamma)));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        Ok(())
    }
}

pub fn pagerank(g: &Graph, params: RankParams) -> Result<RankVector> {
    params.validate()?;
    let walk = random_walk_matrix(g);
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyInput("graph has no nodes"));
    }
    let teleport = (1.0 - params.gamma) / n as f64;
    let mut x = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for _ in 0..params.max_iters {
        let next = step(&walk, &x, params.gamma, teleport);
        residual = max_abs_change(&x, &next);
        x = next;
        if residual < params.tol {
            return Ok(RankVector {
                values: x,
                gamma: params.gamma,
                kind: RankKind::PageRank,
            });
        }
    }
    Err(Error::NotConverged {
        what: "pagerank",
        iterations: params.max_iters,
        residual,
    })
}

/// APR with `labeled` pinned to `pr`. Unlabeled entries start at zero.
pub fn adaptive_pagerank(g: &Graph, labeled: &[usize], pr: &RankVector, params: RankParams) -> Result<RankVector> {
    params.validate()?;
    let n = g.node_count();
    if pr.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "pagerank vector has {} entries, graph has {n} nodes",
            pr.len()
        )));
    }
    let mut pinned = vec![false; n];
    for &i in labeled {
        g.check_node(i)?;
        pinned[i] = true;
    }
    let walk = random_walk_matrix(g);
    let teleport = (1.0 - params.gamma) / n as f64;
    let mut x: Vec<f64> = (0..n).map(|i| if pinned[i] { pr.values[i] } else { 0.0 }).collect();
    let mut residual = f64::INFINITY;
    for _ in 0..params.max_iters {
        let mut next = step(&walk, &x, params.gamma, teleport);
        for i in 0..n {
            if pinned[i] {
                next[i] = pr.values[i];
            }
        }
        residual = max_abs_change(&x, &next);
        x = next;
        if residual < params.tol {
            return Ok(RankVector {
                values: x,
                gamma: params.gamma,
                kind: RankKind::Adaptive,
            });
        }
    }
    Err(Error::NotConverged {
        what: "adaptive pagerank",
        iterations: params.max_iters,
        residual,
    })
}

/// `max_{i ∈ U} |APR(i) − γ(ĀᵀAPR)(i) − (1 − γ)/N|` over the unlabeled rows.
pub fn adaptive_residual(g: &Graph, labeled: &[usize], apr: &RankVector) -> f64 {
    let n = g.node_count();
    let walk = random_walk_matrix(g);
    let teleport = (1.0 - apr.gamma) / n as f64;
    let applied = step(&walk, &apr.values, apr.gamma, teleport);
    let mut pinned = vec![false; n];
    labeled.iter().for_each(|&i| pinned[i] = true);
    (0..n)
        .filter(|&i| !pinned[i])
        .map(|i| (apr.values[i] - applied[i]).abs())
        .fold(0.0, f64::max)
}

/// `pr(i) / apr(i)` for each candidate, in candidate order. Ratios above one
/// mark nodes whose rank is not yet supported by the labeled set.
pub fn apr_query_scores(pr: &RankVector, apr: &RankVector, candidates: &[usize]) -> Result<Vec<f64>> {
    if pr.len() != apr.len() {
        return Err(Error::DimensionMismatch(format!(
            "pr has {} entries, apr has {}",
            pr.len(),
            apr.len()
        )));
    }
    candidates
        .iter()
        .map(|&i| {
            if i >= pr.len() {
                return Err(Error::NodeOutOfRange { index: i, n: pr.len() });
            }
            Ok(pr.values[i] / apr.values[i])
        })
        .collect()
}

fn step(walk: &RandomWalkMatrix, x: &[f64], gamma: f64, teleport: f64) -> Vec<f64> {
    let mut y = walk.transpose_mul(x);
    for v in &mut y {
        *v = gamma * *v + teleport;
    }
    y
}

fn max_abs_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(values: Vec<f64>, kind: RankKind) -> RankVector {
        RankVector {
            values,
            gamma: DEFAULT_GAMMA,
            kind,
        }
    }

    #[test]
    fn reciprocal_pair_is_uniform() {
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        let pr = pagerank(&g, RankParams::default()).unwrap();
        for v in pr.values() {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn sums_to_one_with_dangling_nodes() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (3, 2), (4, 0)]).unwrap();
        let pr = pagerank(&g, RankParams::default()).unwrap();
        assert!((pr.values().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(pr.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn rejects_bad_gamma_and_reports_nonconvergence() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let bad = RankParams {
            gamma: 1.0,
            ..RankParams::default()
        };
        assert!(pagerank(&g, bad).is_err());
        let short = RankParams {
            max_iters: 2,
            tol: 1e-15,
            ..RankParams::default()
        };
        assert!(matches!(pagerank(&g, short), Err(Error::NotConverged { .. })));
    }

    #[test]
    fn empty_labeled_set_reproduces_pagerank() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (3, 2)]).unwrap();
        let pr = pagerank(&g, RankParams::default()).unwrap();
        let apr = adaptive_pagerank(&g, &[], &pr, RankParams::default()).unwrap();
        for (a, b) in apr.values().iter().zip(pr.values()) {
            assert!((a - b).abs() < 1e-8);
        }
        assert_eq!(apr.kind(), RankKind::Adaptive);
    }

    #[test]
    fn labeled_entries_stay_pinned() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let pr = pagerank(&g, RankParams::default()).unwrap();
        let apr = adaptive_pagerank(&g, &[1, 3], &pr, RankParams::default()).unwrap();
        assert_eq!(apr.values()[1], pr.values()[1]);
        assert_eq!(apr.values()[3], pr.values()[3]);
        assert!(adaptive_residual(&g, &[1, 3], &apr) < DEFAULT_TOL);
        assert!(adaptive_pagerank(&g, &[9], &pr, RankParams::default()).is_err());
    }

    #[test]
    fn ratio_scores() {
        let pr = rv(vec![0.2, 0.3, 0.5], RankKind::PageRank);
        let apr = rv(vec![0.2, 0.6, 0.25], RankKind::Adaptive);
        assert_eq!(apr_query_scores(&pr, &apr, &[0, 1, 2]).unwrap(), vec![1.0, 0.5, 2.0]);
        let short = rv(vec![0.2], RankKind::Adaptive);
        assert!(apr_query_scores(&pr, &short, &[0]).is_err());
    }
}
