//! Dataset directories and their parsers.
//!
//! A dataset directory holds `edges.tsv` (`src<TAB>dst`), `labels.tsv`
//! (`node_id<TAB>class_name`) and optionally `content.tsv`
//! (`node_id<TAB>w1<TAB>…<TAB>wF<TAB>class_name`, the Cora/CiteSeer
//! `.content` layout).

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::gcn::{FeatureKind, FeatureMatrix};
use crate::graph::{read_edges_into, sbm_generate, split_fields, CsrMatrix, Graph, GraphBuilder, LoadStats, SbmParams, Separator};

pub const EDGES_FILE: &str = "edges.tsv";
pub const LABELS_FILE: &str = "labels.tsv";
pub const CONTENT_FILE: &str = "content.tsv";

/// Published size of a known dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetInfo {
    pub name: &'static str,
    pub nodes: usize,
    pub edges: usize,
    pub classes: usize,
    /// Bag-of-words width, when content is distributed.
    pub features: Option<usize>,
    /// Query batch size used for this dataset.
    pub batch_size: usize,
    /// Whether isolated nodes are dropped at load by default.
    pub drop_isolated: bool,
}

pub const REGISTRY: &[DatasetInfo] = &[
    DatasetInfo { name: "cora", nodes: 2708, edges: 5429, classes: 7, features: Some(1433), batch_size: 1, drop_isolated: true },
    DatasetInfo { name: "citeseer", nodes: 3312, edges: 4732, classes: 6, features: Some(3703), batch_size: 1, drop_isolated: false },
    DatasetInfo { name: "email-eu", nodes: 1005, edges: 25571, classes: 42, features: None, batch_size: 1, drop_isolated: false },
    DatasetInfo { name: "pubmed", nodes: 19717, edges: 44338, classes: 3, features: Some(500), batch_size: 5, drop_isolated: false },
    DatasetInfo { name: "subelj-cora", nodes: 23166, edges: 91500, classes: 10, features: None, batch_size: 5, drop_isolated: false },
    DatasetInfo { name: "wikispeedia", nodes: 4604, edges: 119882, classes: 15, features: None, batch_size: 1, drop_isolated: false },
];

/// Looks up a registry entry, ignoring case and `_`/`-`/space differences.
pub fn dataset_info(name: &str) -> Option<&'static DatasetInfo> {
    let key = |s: &str| s.to_ascii_lowercase().replace(['_', ' '], "-");
    let wanted = key(name);
    REGISTRY.iter().find(|d| key(d.name) == wanted)
}

/// Node labels keyed by external id, in file order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelTable {
    pub entries: Vec<(String, usize)>,
    pub class_names: Vec<String>,
}

fn intern_class(names: &mut Vec<String>, lookup: &mut HashMap<String, usize>, name: &str) -> usize {
    *lookup.entry(name.to_owned()).or_insert_with(|| {
        names.push(name.to_owned());
        names.len() - 1
    })
}

fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = (usize, std::io::Result<String>)> {
    reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => !(s.trim().is_empty() || s.trim_start().starts_with('#')),
            Err(_) => true,
        })
}

/// Parses `node_id<TAB>class_name` lines. Classes are indexed by first
/// appearance.
pub fn load_labels<R: BufRead>(reader: R, sep: Separator) -> Result<LabelTable> {
    let mut table = LabelTable::default();
    let mut lookup = HashMap::new();
    let mut seen = HashMap::new();
    for (line, text) in content_lines(reader) {
        let text = text?;
        let fields = split_fields(text.trim_end_matches('\r'), sep);
        if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::Parse {
                line,
                message: format!("expected `node_id<TAB>class_name`, found {} fields", fields.len()),
            });
        }
        if seen.insert(fields[0].to_owned(), ()).is_some() {
            return Err(Error::DuplicateNode(fields[0].to_owned()));
        }
        let class = intern_class(&mut table.class_names, &mut lookup, fields[1]);
        table.entries.push((fields[0].to_owned(), class));
    }
    if table.entries.is_empty() {
        return Err(Error::EmptyInput("label file has no rows"));
    }
    Ok(table)
}

/// Rows of a content file in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct ContentTable {
    pub ids: Vec<String>,
    pub labels: LabelTable,
    /// One row per entry of `ids`.
    pub features: FeatureMatrix,
}

/// Parses `node_id<TAB>w1…wF<TAB>class_name` lines. Feature values may be
/// 0/1 or real-valued.
pub fn load_content<R: BufRead>(reader: R, sep: Separator) -> Result<ContentTable> {
    let mut ids = Vec::new();
    let mut labels = LabelTable::default();
    let mut lookup = HashMap::new();
    let mut seen = HashMap::new();
    let mut triplets = Vec::new();
    let mut width: Option<usize> = None;
    for (line, text) in content_lines(reader) {
        let text = text?;
        let fields = split_fields(text.trim_end_matches('\r'), sep);
        if fields.len() < 2 {
            return Err(Error::Parse {
                line,
                message: "content row needs an id and a class".into(),
            });
        }
        let f = fields.len() - 2;
        match width {
            None => width = Some(f),
            Some(w) if w != f => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {w} feature columns, found {f}"),
                })
            }
            _ => {}
        }
        let id = fields[0];
        if seen.insert(id.to_owned(), ()).is_some() {
            return Err(Error::DuplicateNode(id.to_owned()));
        }
        let row = ids.len();
        for (c, raw) in fields[1..=f].iter().enumerate() {
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                line,
                message: format!("feature column {} is not a number: `{raw}`", c + 1),
            })?;
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("feature column {} is negative or non-finite", c + 1),
                });
            }
            if v != 0.0 {
                triplets.push((row, c, v));
            }
        }
        let class = intern_class(&mut labels.class_names, &mut lookup, fields[f + 1]);
        labels.entries.push((id.to_owned(), class));
        ids.push(id.to_owned());
    }
    let width = width.ok_or(Error::EmptyInput("content file has no rows"))?;
    let features = FeatureMatrix::new(
        FeatureKind::BagOfWords,
        CsrMatrix::from_triplets(ids.len(), width, &triplets),
    )?;
    Ok(ContentTable { ids, labels, features })
}

/// A graph with a total labeling and optional static features.
///
/// Equality compares content only; `load_stats` describes the source file.
#[derive(Debug, Clone)]
pub struct DatasetBundle {
    pub name: String,
    pub graph: Graph,
    /// Class index of every node.
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub features: Option<FeatureMatrix>,
    /// Edge counts as read, before cleanup.
    pub load_stats: LoadStats,
}

impl PartialEq for DatasetBundle {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.graph == other.graph
            && self.labels == other.labels
            && self.class_names == other.class_names
            && self.features == other.features
    }
}

impl DatasetBundle {
    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn check(&self) -> Result<()> {
        let n = self.graph.node_count();
        if self.labels.len() != n {
            return Err(Error::DimensionMismatch(format!("{} labels for {n} nodes", self.labels.len())));
        }
        if let Some(&c) = self.labels.iter().find(|&&c| c >= self.num_classes()) {
            return Err(Error::ClassOutOfRange {
                class: c,
                num_classes: self.num_classes(),
            });
        }
        if let Some(f) = &self.features {
            if f.rows() != n {
                return Err(Error::DimensionMismatch(format!("{} feature rows for {n} nodes", f.rows())));
            }
        }
        Ok(())
    }

    /// Synthetic bundle from a stochastic block model; class names are the
    /// block indices.
    pub fn from_sbm(params: &SbmParams) -> Result<DatasetBundle> {
        let (graph, labels) = sbm_generate(params)?;
        let edges = graph.edge_count();
        Ok(DatasetBundle {
            name: "sbm".into(),
            graph,
            labels,
            class_names: (0..params.block_sizes.len()).map(|b| format!("block{b}")).collect(),
            features: None,
            load_stats: LoadStats {
                raw_edges: edges,
                ..LoadStats::default()
            },
        })
    }

    /// Writes the bundle in the directory layout read by
    /// [`load_dataset_dir`]. Reloading yields an equal bundle when classes
    /// are numbered by first appearance in node order, as they are for
    /// loaded and generated bundles.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut edges = std::io::BufWriter::new(File::create(dir.join(EDGES_FILE))?);
        for &(s, d) in self.graph.edges() {
            writeln!(edges, "{}\t{}", self.graph.node_id(s), self.graph.node_id(d))?;
        }
        edges.flush()?;
        let mut labels = std::io::BufWriter::new(File::create(dir.join(LABELS_FILE))?);
        for (i, &c) in self.labels.iter().enumerate() {
            writeln!(labels, "{}\t{}", self.graph.node_id(i), self.class_names[c])?;
        }
        labels.flush()?;
        if let Some(f) = &self.features {
            let mut content = std::io::BufWriter::new(File::create(dir.join(CONTENT_FILE))?);
            let m = f.matrix();
            for i in 0..m.rows() {
                write!(content, "{}", self.graph.node_id(i))?;
                for c in 0..m.cols() {
                    let v = m.get(i, c);
                    if v == 0.0 {
                        write!(content, "\t0")?;
                    } else {
                        write!(content, "\t{v}")?;
                    }
                }
                writeln!(content, "\t{}", self.class_names[self.labels[i]])?;
            }
            content.flush()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Registry name; defaults to the directory name.
    pub name: Option<String>,
    /// Overrides the registry's default for dropping isolated nodes.
    pub drop_isolated: Option<bool>,
    pub separator: Separator,
}

/// Node counts removed while aligning the three files.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AlignmentReport {
    pub unlabeled_dropped: usize,
    pub content_without_node: usize,
    pub node_without_content: usize,
    pub isolated_dropped: usize,
    /// Labeled nodes without any edge; kept as isolated nodes unless
    /// isolated nodes are dropped.
    pub label_only_nodes: usize,
}

/// Reads a dataset directory and aligns graph, labels and content. Node
/// indices follow the order of `labels.tsv`.
///
/// Labeled nodes absent from the edge list become isolated nodes; graph
/// nodes without a label are dropped. When content is present, content rows
/// without a graph node and graph nodes without a content row are dropped.
pub fn load_dataset_dir(dir: &Path, opts: &LoadOptions) -> Result<(DatasetBundle, AlignmentReport)> {
    let name = opts.name.clone().unwrap_or_else(|| {
        dir.file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    });
    let drop_isolated = opts
        .drop_isolated
        .unwrap_or_else(|| dataset_info(&name).is_some_and(|d| d.drop_isolated));
    let open = |file: &str| -> Result<BufReader<File>> {
        let path = dir.join(file);
        File::open(&path)
            .map(BufReader::new)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
    };

    // Label-file order fixes node indices, so a written bundle reloads
    // with the same indexing.
    let table = load_labels(open(LABELS_FILE)?, opts.separator)?;
    let mut builder = GraphBuilder::new();
    for (id, _) in &table.entries {
        builder.add_node(id);
    }
    read_edges_into(&mut builder, open(EDGES_FILE)?, opts.separator)?;
    let mut report = AlignmentReport::default();
    let (graph, load_stats) = builder.build();
    if load_stats.raw_edges == 0 {
        return Err(Error::EmptyInput("edge list has no edges"));
    }
    let n = graph.node_count();
    report.label_only_nodes = (0..table.entries.len()).filter(|&i| graph.undirected_degree(i) == 0).count();

    let mut class_of = vec![None; n];
    for (id, c) in &table.entries {
        class_of[graph.index_of(id).expect("label ids were interned")] = Some(*c);
    }
    let mut keep: Vec<bool> = class_of.iter().map(Option::is_some).collect();
    report.unlabeled_dropped = keep.iter().filter(|k| !**k).count();

    let content = if dir.join(CONTENT_FILE).exists() {
        Some(load_content(open(CONTENT_FILE)?, opts.separator)?)
    } else {
        None
    };
    let mut content_row = vec![None; n];
    if let Some(ct) = &content {
        for (row, id) in ct.ids.iter().enumerate() {
            match graph.index_of(id) {
                Some(i) => content_row[i] = Some(row),
                None => report.content_without_node += 1,
            }
        }
        for i in 0..n {
            if keep[i] && content_row[i].is_none() {
                keep[i] = false;
                report.node_without_content += 1;
            }
        }
    }

    let (mut graph, mut old_of_new) = graph.induced_subgraph(&keep);
    if drop_isolated {
        let connected: Vec<bool> = (0..graph.node_count()).map(|i| graph.undirected_degree(i) > 0).collect();
        report.isolated_dropped = connected.iter().filter(|c| !**c).count();
        if report.isolated_dropped > 0 {
            let (g2, map) = graph.induced_subgraph(&connected);
            old_of_new = map.into_iter().map(|i| old_of_new[i]).collect();
            graph = g2;
        }
    }

    // Classes are renumbered by first appearance among the kept nodes.
    let mut class_names = Vec::new();
    let mut new_class = vec![None; table.class_names.len()];
    let labels: Vec<usize> = old_of_new
        .iter()
        .map(|&o| {
            let c = class_of[o].expect("kept nodes are labeled");
            *new_class[c].get_or_insert_with(|| {
                class_names.push(table.class_names[c].clone());
                class_names.len() - 1
            })
        })
        .collect();
    let absent = table.class_names.len() - class_names.len();
    if absent > 0 {
        warn!("{name}: {absent} classes have no node left after alignment");
    }
    let features = content.map(|ct| {
        let rows: Vec<usize> = old_of_new.iter().map(|&o| content_row[o].expect("kept nodes have content")).collect();
        ct.features.select_rows(&rows)
    });

    for (what, count) in [
        ("graph nodes without a label", report.unlabeled_dropped),
        ("content rows without a graph node", report.content_without_node),
        ("graph nodes without a content row", report.node_without_content),
        ("isolated nodes", report.isolated_dropped),
    ] {
        if count > 0 {
            warn!("{name}: dropped {count} {what}");
        }
    }

    let bundle = DatasetBundle {
        name,
        graph,
        labels,
        class_names,
        features,
        load_stats,
    };
    bundle.check()?;
    Ok((bundle, report))
}

/// Observed counts of a bundle next to the registry's published counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub name: String,
    pub nodes: usize,
    /// Directed edges as read, before cleanup.
    pub raw_edges: usize,
    pub edges: usize,
    pub classes: usize,
    pub features: Option<usize>,
    pub expected: Option<DatasetInfo>,
    pub warnings: Vec<String>,
}

pub fn validate_bundle(b: &DatasetBundle) -> ValidationReport {
    let expected = dataset_info(&b.name).copied();
    let mut report = ValidationReport {
        name: b.name.clone(),
        nodes: b.graph.node_count(),
        raw_edges: b.load_stats.raw_edges,
        edges: b.graph.edge_count(),
        classes: b.num_classes(),
        features: b.features.as_ref().map(FeatureMatrix::cols),
        expected,
        warnings: Vec::new(),
    };
    if let Some(e) = expected {
        let mut cmp = |what: &str, got: usize, want: usize| {
            if got != want {
                report.warnings.push(format!("{what}: found {got}, expected {want}"));
            }
        };
        cmp("nodes", report.nodes, e.nodes);
        cmp("edges", report.raw_edges, e.edges);
        cmp("classes", report.classes, e.classes);
        if let (Some(got), Some(want)) = (report.features, e.features) {
            cmp("features", got, want);
        }
    }
    report
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dataset: {}", self.name)?;
        writeln!(f, "{} nodes / {} classes", self.nodes, self.classes)?;
        writeln!(f, "{} edges read, {} after cleanup", self.raw_edges, self.edges)?;
        if let Some(w) = self.features {
            writeln!(f, "{w} content features")?;
        }
        match &self.expected {
            Some(e) => writeln!(
                f,
                "registry: {} nodes / {} edges / {} classes",
                e.nodes, e.edges, e.classes
            )?,
            None => writeln!(f, "registry: no entry")?,
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_indexed_by_first_appearance() {
        let t = load_labels("a\tML\nb\tDB\nc\tML\n".as_bytes(), Separator::Tab).unwrap();
        assert_eq!(t.class_names, vec!["ML", "DB"]);
        assert_eq!(t.entries[2], ("c".to_string(), 0));
    }

    #[test]
    fn duplicate_label_is_rejected() {
        match load_labels("a\tx\na\ty\n".as_bytes(), Separator::Tab) {
            Err(Error::DuplicateNode(id)) => assert_eq!(id, "a"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load_labels("a\n".as_bytes(), Separator::Tab),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn content_rows_and_zero_rows() {
        let text = "p1\t0\t1\t0\tA\np2\t0\t0\t0\tB\np3\t0.5\t0\t2.25\tA\n";
        let c = load_content(text.as_bytes(), Separator::Tab).unwrap();
        assert_eq!(c.features.cols(), 3);
        assert_eq!(c.features.matrix().get(2, 2), 2.25);
        assert_eq!(c.features.matrix().row(1).0.len(), 0);
        assert_eq!(c.labels.class_names, vec!["A", "B"]);
    }

    #[test]
    fn content_column_mismatch_is_an_error() {
        let text = "p1\t0\t1\tA\np2\t0\tB\n";
        assert!(matches!(
            load_content(text.as_bytes(), Separator::Tab),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(dataset_info("Email_EU").unwrap().classes, 42);
        assert_eq!(dataset_info("PUBMED").unwrap().nodes, 19717);
        assert!(dataset_info("imaginary").is_none());
    }
}
