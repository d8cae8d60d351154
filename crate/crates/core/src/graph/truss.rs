use std::collections::HashMap;

use super::Graph;

/// Node trussness on the undirected view: the largest `k` such that some
/// incident edge belongs to the `k`-truss (every edge in at least `k − 2`
/// triangles). Isolated nodes score 0; edges without triangles have
/// trussness 2.
pub fn k_truss_scores(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut edges = Vec::with_capacity(g.undirected_edge_count());
    let mut edge_id = HashMap::with_capacity(g.undirected_edge_count());
    for u in 0..n {
        for &v in g.neighbors(u) {
            if u < v {
                edge_id.insert((u, v), edges.len());
                edges.push((u, v));
            }
        }
    }
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };

    let mut support: Vec<usize> = edges
        .iter()
        .map(|&(u, v)| sorted_intersection_len(g.neighbors(u), g.neighbors(v)))
        .collect();
    let mut alive = vec![true; edges.len()];
    let mut truss = vec![0usize; edges.len()];
    let mut remaining = edges.len();
    let mut k = 2;
    let mut stack = Vec::new();

    while remaining > 0 {
        stack.extend((0..edges.len()).filter(|&e| alive[e] && support[e] + 2 <= k));
        while let Some(e) = stack.pop() {
            if !alive[e] {
                continue;
            }
            alive[e] = false;
            truss[e] = k;
            remaining -= 1;
            let (u, v) = edges[e];
            for &w in g.neighbors(u) {
                if w == v {
                    continue;
                }
                let (Some(&uw), Some(&vw)) = (edge_id.get(&key(u, w)), edge_id.get(&key(v, w))) else {
                    continue;
                };
                if !(alive[uw] && alive[vw]) {
                    continue;
                }
                for f in [uw, vw] {
                    support[f] -= 1;
                    if support[f] + 2 <= k {
                        stack.push(f);
                    }
                }
            }
        }
        k += 1;
    }

    let mut scores = vec![0usize; n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        scores[u] = scores[u].max(truss[e]);
        scores[v] = scores[v].max(truss[e]);
    }
    scores
}

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn triangle_scores_three() {
        assert_eq!(k_truss_scores(&complete(3)), vec![3, 3, 3]);
    }

    #[test]
    fn k4_scores_four() {
        assert_eq!(k_truss_scores(&complete(4)), vec![4; 4]);
    }

    #[test]
    fn path_scores_two_and_isolated_zero() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 1)]).unwrap();
        assert_eq!(k_truss_scores(&g), vec![2, 2, 2, 0]);
    }

    #[test]
    fn triangle_with_tail() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        assert_eq!(k_truss_scores(&g), vec![3, 3, 3, 2]);
    }
}
