use std::collections::VecDeque;

use super::Graph;
use crate::error::{invalid, Error, Result};

/// Distance assigned to nodes that cannot reach any source.
pub const DEFAULT_DISTANCE_CAP: usize = 9;

/// Multi-source BFS on the undirected view. Entry `i` is the hop distance
/// from `i` to the nearest source, clamped to `cap`; unreachable nodes get
/// `cap`.
pub fn bfs_distances(g: &Graph, sources: &[usize], cap: usize) -> Result<Vec<usize>> {
    if sources.is_empty() {
        return Err(Error::EmptyInput("bfs sources"));
    }
    if cap == 0 {
        return Err(invalid("cap", "must be at least 1"));
    }
    let n = g.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        g.check_node(s)?;
        if dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        // Nothing beyond the cap can change the clamped result.
        if next >= cap {
            continue;
        }
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
    Ok(dist.into_iter().map(|d| d.min(cap)).collect())
}
