//! Immutable directed graphs and the pure algorithms that query them.
//!
//! A [`Graph`] stores out- and in-neighbors in compressed sparse row form
//! plus a precomputed undirected view (the union of both directions). Most
//! strategies and the GCN only look at the undirected view; PageRank uses the
//! directed out-edges.

mod adjacency;
mod bfs;
mod sbm;
mod sparse;
mod truss;

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use crate::error::{Error, Result};

pub use adjacency::{normalized_adjacency, random_walk_matrix, AdjacencyMode, NormalizedAdjacency, RandomWalkMatrix};
pub use bfs::{bfs_distances, DEFAULT_DISTANCE_CAP};
pub use sbm::{sbm_generate, SbmParams};
pub use sparse::CsrMatrix;
pub use truss::k_truss_scores;

/// Neighbor lists in compressed sparse row form, sorted within each row.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Adjacency {
    fn from_pairs(n: usize, pairs: impl Iterator<Item = (usize, usize)>) -> Self {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (a, b) in pairs {
            rows[a].push(b);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for mut row in rows {
            row.sort_unstable();
            row.dedup();
            targets.extend(row);
            offsets.push(targets.len());
        }
        Adjacency { offsets, targets }
    }

    fn row(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// Counts gathered while building a graph from raw edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    /// Edge records read, before any cleanup.
    pub raw_edges: usize,
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Immutable directed graph without self-loops or parallel edges.
#[derive(Debug, Clone)]
pub struct Graph {
    node_ids: Vec<String>,
    index: HashMap<String, usize>,
    out: Adjacency,
    inc: Adjacency,
    und: Adjacency,
    edges: Vec<(usize, usize)>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.node_ids == other.node_ids && self.edges == other.edges
    }
}

impl Graph {
    /// Builds a graph over nodes `0..n` named by their decimal index.
    /// Self-loops and duplicate edges are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b.add_node(&i.to_string());
        }
        for &(s, d) in edges {
            for v in [s, d] {
                if v >= n {
                    return Err(Error::NodeOutOfRange { index: v, n });
                }
            }
            b.add_edge_indices(s, d);
        }
        Ok(b.build().0)
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    /// Number of directed edges after cleanup.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Directed edges sorted by `(src, dst)`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_id(&self, i: usize) -> &str {
        &self.node_ids[i]
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        self.out.row(i)
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        self.inc.row(i)
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out.row(i).len()
    }

    /// Union of in- and out-neighbors of `i`, sorted, excluding `i`.
    pub fn undirected_neighbors(&self, i: usize) -> Result<&[usize]> {
        self.check_node(i)?;
        Ok(self.und.row(i))
    }

    /// Unchecked variant of [`Graph::undirected_neighbors`] for hot loops.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        self.und.row(i)
    }

    pub fn undirected_degree(&self, i: usize) -> usize {
        self.und.row(i).len()
    }

    /// Number of undirected edges (reciprocal pairs count once).
    pub fn undirected_edge_count(&self) -> usize {
        self.und.targets.len() / 2
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.out.row(src).binary_search(&dst).is_ok()
    }

    pub fn check_node(&self, i: usize) -> Result<()> {
        if i < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                index: i,
                n: self.node_count(),
            })
        }
    }

    /// Subgraph induced by the nodes with `keep[i] == true`, preserving the
    /// relative node order. Returns the new graph and, for each kept node, its
    /// index in `self`.
    pub fn induced_subgraph(&self, keep: &[bool]) -> (Graph, Vec<usize>) {
        assert_eq!(keep.len(), self.node_count());
        let mut b = GraphBuilder::new();
        let mut old_of_new = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                b.add_node(&self.node_ids[i]);
                old_of_new.push(i);
            }
        }
        for &(s, d) in &self.edges {
            if keep[s] && keep[d] {
                b.add_edge(&self.node_ids[s], &self.node_ids[d]);
            }
        }
        (b.build().0, old_of_new)
    }

    /// Same graph with node `i` moved to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.node_count());
        let mut ids = vec![String::new(); perm.len()];
        for (old, &new) in perm.iter().enumerate() {
            ids[new] = self.node_ids[old].clone();
        }
        let mut b = GraphBuilder::new();
        for id in &ids {
            b.add_node(id);
        }
        for &(s, d) in &self.edges {
            b.add_edge_indices(perm[s], perm[d]);
        }
        b.build().0
    }

    /// Checks that the in-neighbor structure is the exact transpose of the
    /// out-neighbor structure.
    pub fn in_is_transpose_of_out(&self) -> bool {
        let t = Adjacency::from_pairs(
            self.node_count(),
            self.edges.iter().map(|&(s, d)| (d, s)),
        );
        t == self.inc
    }
}

/// Incremental constructor that interns external ids in order of first
/// appearance.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    node_ids: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the index of `id`, inserting it if unseen.
    pub fn add_node(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.node_ids.len();
        self.node_ids.push(id.to_owned());
        self.index.insert(id.to_owned(), i);
        i
    }

    pub fn add_edge(&mut self, src: &str, dst: &str) {
        let s = self.add_node(src);
        let d = self.add_node(dst);
        self.edges.push((s, d));
    }

    fn add_edge_indices(&mut self, s: usize, d: usize) {
        self.edges.push((s, d));
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn build(self) -> (Graph, LoadStats) {
        let n = self.node_ids.len();
        let mut stats = LoadStats {
            raw_edges: self.edges.len(),
            ..LoadStats::default()
        };
        let mut seen = HashSet::with_capacity(self.edges.len());
        let mut edges = Vec::with_capacity(self.edges.len());
        for (s, d) in self.edges {
            if s == d {
                stats.self_loops += 1;
            } else if !seen.insert((s, d)) {
                stats.duplicates += 1;
            } else {
                edges.push((s, d));
            }
        }
        edges.sort_unstable();
        let out = Adjacency::from_pairs(n, edges.iter().copied());
        let inc = Adjacency::from_pairs(n, edges.iter().map(|&(s, d)| (d, s)));
        let und = Adjacency::from_pairs(n, edges.iter().flat_map(|&(s, d)| [(s, d), (d, s)]));
        let graph = Graph {
            node_ids: self.node_ids,
            index: self.index,
            out,
            inc,
            und,
            edges,
        };
        (graph, stats)
    }
}

/// Field separator accepted by [`load_edge_list`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Separator {
    /// Exactly one tab between fields.
    #[default]
    Tab,
    /// Any run of spaces or tabs.
    Whitespace,
}

pub(crate) fn split_fields(line: &str, sep: Separator) -> Vec<&str> {
    match sep {
        Separator::Tab => line.split('\t').collect(),
        Separator::Whitespace => line.split_whitespace().collect(),
    }
}

/// Parses `src<TAB>dst` lines. Blank lines and lines starting with `#` are
/// skipped. Nodes are indexed by first appearance.
pub fn load_edge_list<R: BufRead>(reader: R, sep: Separator) -> Result<(Graph, LoadStats)> {
    let mut b = GraphBuilder::new();
    read_edges_into(&mut b, reader, sep)?;
    if b.node_count() == 0 {
        return Err(Error::EmptyInput("edge list has no edges"));
    }
    Ok(b.build())
}

pub(crate) fn read_edges_into<R: BufRead>(b: &mut GraphBuilder, reader: R, sep: Separator) -> Result<()> {
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        let fields = split_fields(trimmed, sep);
        if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected 2 fields `src<TAB>dst`, found {}", fields.len()),
            });
        }
        b.add_edge(fields[0], fields[1]);
    }
    Ok(())
}
