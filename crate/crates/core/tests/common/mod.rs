//! Brute-force reference implementations used by the integration tests.
//! None of them call into the library beyond reading a graph's edge list.

#![allow(dead_code)]

use std::collections::BTreeSet;

use graph_al::graph::Graph;
use rand::Rng;

/// Directed G(n, p) without self-loops.
pub fn random_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if s != d && rng.random::<f64>() < p {
                edges.push((s, d));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Undirected graph on `n` nodes whose edges are the set bits of `mask`
/// over the pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Sorted undirected neighbor sets rebuilt from the edge list.
pub fn neighbor_sets(g: &Graph) -> Vec<BTreeSet<usize>> {
    let mut nb = vec![BTreeSet::new(); g.node_count()];
    for &(s, d) in g.edges() {
        if s != d {
            nb[s].insert(d);
            nb[d].insert(s);
        }
    }
    nb
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        assert!(p.abs() > 1e-300, "singular system");
        for r in col + 1..n {
            let f = a[r][col] / p;
            if f != 0.0 {
                let (top, rest) = a.split_at_mut(r);
                for (x, &y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= f * y;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    x
}

/// Row-stochastic walk matrix over out-edges; dangling rows are uniform.
pub fn walk_dense(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut out = vec![Vec::new(); n];
    for &(s, d) in g.edges() {
        out[s].push(d);
    }
    (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            if out[i].is_empty() {
                row.iter_mut().for_each(|v| *v = 1.0 / n as f64);
            } else {
                for &j in &out[i] {
                    row[j] += 1.0 / out[i].len() as f64;
                }
            }
            row
        })
        .collect()
}

/// PageRank by direct solve of `(I − γPᵀ) x = (1 − γ)/N · 1`.
pub fn pagerank_dense(g: &Graph, gamma: f64) -> Vec<f64> {
    let n = g.node_count();
    let p = walk_dense(g);
    let a = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j)) - gamma * p[j][i]).collect())
        .collect();
    dense_solve(a, vec![(1.0 - gamma) / n as f64; n])
}

/// Adaptive rank by direct solve over the unlabeled block:
/// `x_U = (I − γPᵀ_UU)⁻¹ (γ Pᵀ_UL x_L + (1 − γ)/N)`, with `x_L = pinned`.
pub fn adaptive_dense(g: &Graph, labeled: &[usize], pinned: &[f64], gamma: f64) -> Vec<f64> {
    let n = g.node_count();
    let p = walk_dense(g);
    let is_l: Vec<bool> = (0..n).map(|i| labeled.contains(&i)).collect();
    let u: Vec<usize> = (0..n).filter(|&i| !is_l[i]).collect();
    let a = u
        .iter()
        .map(|&i| u.iter().map(|&j| f64::from(u8::from(i == j)) - gamma * p[j][i]).collect())
        .collect();
    let b = u
        .iter()
        .map(|&i| {
            let from_l: f64 = (0..n).filter(|&j| is_l[j]).map(|j| p[j][i] * pinned[j]).sum();
            gamma * from_l + (1.0 - gamma) / n as f64
        })
        .collect();
    let xu = dense_solve(a, b);
    let mut x = vec![0.0; n];
    for &i in labeled {
        x[i] = pinned[i];
    }
    for (k, &i) in u.iter().enumerate() {
        x[i] = xu[k];
    }
    x
}

/// All-pairs hop distances on the undirected view; `usize::MAX` when
/// unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, nb) in neighbor_sets(g).iter().enumerate() {
        d[i][i] = 0;
        for &j in nb {
            d[i][j] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|v| if v >= inf { usize::MAX } else { v }).collect())
        .collect()
}

/// Node trussness by repeated whole-graph peeling: for each `k`, delete
/// edges in fewer than `k − 2` triangles until none remain to delete.
pub fn truss_brute(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let nb = neighbor_sets(g);
    let mut score: Vec<usize> = (0..n).map(|i| if nb[i].is_empty() { 0 } else { 2 }).collect();
    let mut k = 3;
    loop {
        let mut alive: BTreeSet<(usize, usize)> = (0..n)
            .flat_map(|i| nb[i].iter().filter(move |&&j| i < j).map(move |&j| (i, j)))
            .collect();
        loop {
            let has = |a: usize, b: usize, s: &BTreeSet<(usize, usize)>| s.contains(&(a.min(b), a.max(b)));
            let weak: Vec<(usize, usize)> = alive
                .iter()
                .copied()
                .filter(|&(a, b)| (0..n).filter(|&w| has(a, w, &alive) && has(b, w, &alive)).count() < k - 2)
                .collect();
            if weak.is_empty() {
                break;
            }
            for e in weak {
                alive.remove(&e);
            }
        }
        if alive.is_empty() {
            return score;
        }
        for &(a, b) in &alive {
            score[a] = k;
            score[b] = k;
        }
        k += 1;
    }
}

/// Central finite difference of `f` at `x[idx]`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], idx: usize, h: f64) -> f64 {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[idx] += h;
    minus[idx] -= h;
    (f(&plus) - f(&minus)) / (2.0 * h)
}
