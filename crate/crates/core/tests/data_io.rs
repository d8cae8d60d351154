use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use graph_al::data::{load_dataset_dir, validate_bundle, DatasetBundle, LoadOptions};
use graph_al::gcn::{FeatureKind, FeatureMatrix};
use graph_al::graph::{CsrMatrix, SbmParams};
use graph_al::Error;

fn sbm_with_content(seed: u64) -> DatasetBundle {
    let mut b = DatasetBundle::from_sbm(&SbmParams {
        block_sizes: vec![8, 12, 10],
        p_within: 0.4,
        p_between: 0.05,
        directed: true,
        seed,
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = b.graph.node_count();
    let mut t = Vec::new();
    for i in 0..n {
        for c in 0..7 {
            match rng.random_range(0..4) {
                0 => t.push((i, c, 1.0)),
                1 => t.push((i, c, rng.random_range(0.0..3.0))),
                _ => {}
            }
        }
    }
    b.features = Some(FeatureMatrix::new(FeatureKind::BagOfWords, CsrMatrix::from_triplets(n, 7, &t)).unwrap());
    b
}

fn opts(name: &str) -> LoadOptions {
    LoadOptions {
        name: Some(name.into()),
        ..LoadOptions::default()
    }
}

#[test]
fn write_then_load_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..5 {
        let b = sbm_with_content(seed);
        let path = dir.path().join(format!("sbm{seed}"));
        b.write_dir(&path).unwrap();
        let (again, report) = load_dataset_dir(&path, &opts("sbm")).unwrap();
        assert_eq!(again, b, "seed {seed}");
        assert_eq!(report.unlabeled_dropped + report.node_without_content + report.content_without_node, 0);
        // and once more from the reloaded bundle
        let path2 = dir.path().join(format!("sbm{seed}-again"));
        again.write_dir(&path2).unwrap();
        assert_eq!(load_dataset_dir(&path2, &opts("sbm")).unwrap().0, b);
    }
}

fn write(dir: &Path, file: &str, text: &str) {
    fs::write(dir.join(file), text).unwrap();
}

#[test]
fn files_are_aligned_by_node_id() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // `x` has edges but no label, `lonely` has a label but no edges,
    // `ghost` has content only, `c` has no content row.
    write(d, "edges.tsv", "a\tb\nb\tc\nc\ta\nx\ta\na\ta\na\tb\n");
    write(d, "labels.tsv", "b\tDB\na\tML\nc\tML\nlonely\tDB\n");
    write(d, "content.tsv", "a\t1\t0\tML\nb\t0\t2.5\tDB\nlonely\t1\t1\tDB\nghost\t0\t1\tML\n");
    let (b, report) = load_dataset_dir(d, &opts("toy")).unwrap();
    assert_eq!(report.unlabeled_dropped, 1);
    assert_eq!(report.node_without_content, 1);
    assert_eq!(report.content_without_node, 1);
    assert_eq!(report.label_only_nodes, 1);
    assert_eq!(report.isolated_dropped, 0);
    assert_eq!(b.graph.node_ids(), &["b", "a", "lonely"]);
    assert_eq!(b.class_names, vec!["DB", "ML"]);
    assert_eq!(b.labels, vec![0, 1, 0]);
    assert_eq!(b.graph.edges(), &[(1, 0)]);
    assert_eq!(b.load_stats.raw_edges, 6);
    assert_eq!(b.load_stats.self_loops, 1);
    assert_eq!(b.load_stats.duplicates, 1);

    // spot audit: id, label, feature row and adjacency row agree
    let f = b.features.as_ref().unwrap().matrix();
    let i = b.graph.index_of("b").unwrap();
    assert_eq!(b.class_names[b.labels[i]], "DB");
    assert_eq!((f.get(i, 0), f.get(i, 1)), (0.0, 2.5));
    assert_eq!(b.graph.in_neighbors(i), &[b.graph.index_of("a").unwrap()]);

    let dropping = LoadOptions {
        drop_isolated: Some(true),
        ..opts("toy")
    };
    let (b, report) = load_dataset_dir(d, &dropping).unwrap();
    assert_eq!(report.isolated_dropped, 1);
    assert_eq!(b.graph.node_ids(), &["b", "a"]);
}

#[test]
fn randomized_alignment_audit() {
    let dir = tempfile::tempdir().unwrap();
    let b = sbm_with_content(9);
    b.write_dir(dir.path()).unwrap();
    let (loaded, _) = load_dataset_dir(dir.path(), &opts("sbm")).unwrap();
    let labels = fs::read_to_string(dir.path().join("labels.tsv")).unwrap();
    let content = fs::read_to_string(dir.path().join("content.tsv")).unwrap();
    let edges = fs::read_to_string(dir.path().join("edges.tsv")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let i = rng.random_range(0..loaded.graph.node_count());
        let id = loaded.graph.node_id(i);
        let label_line = labels.lines().find(|l| l.split('\t').next() == Some(id)).unwrap();
        assert_eq!(label_line.split('\t').nth(1).unwrap(), loaded.class_names[loaded.labels[i]]);
        let row: Vec<f64> = content
            .lines()
            .find(|l| l.split('\t').next() == Some(id))
            .unwrap()
            .split('\t')
            .skip(1)
            .take(7)
            .map(|v| v.parse().unwrap())
            .collect();
        let f = loaded.features.as_ref().unwrap().matrix();
        assert_eq!(row, (0..7).map(|c| f.get(i, c)).collect::<Vec<_>>());
        let mut out: Vec<&str> = edges
            .lines()
            .filter_map(|l| l.split_once('\t'))
            .filter(|(s, _)| *s == id)
            .map(|(_, d)| d)
            .collect();
        out.sort_unstable();
        let mut want: Vec<&str> = loaded.graph.out_neighbors(i).iter().map(|&j| loaded.graph.node_id(j)).collect();
        want.sort_unstable();
        assert_eq!(out, want);
    }
}

#[test]
fn malformed_and_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "edges.tsv", "a\tb\n");
    assert!(matches!(load_dataset_dir(d, &opts("toy")), Err(Error::Io(_))));
    write(d, "labels.tsv", "a\tX\nb\n");
    assert!(matches!(load_dataset_dir(d, &opts("toy")), Err(Error::Parse { line: 2, .. })));
    write(d, "labels.tsv", "a\tX\nb\tY\n");
    write(d, "content.tsv", "a\t1\t0\tX\nb\t1\tY\n");
    assert!(matches!(load_dataset_dir(d, &opts("toy")), Err(Error::Parse { line: 2, .. })));
}

#[test]
fn validation_echoes_generator_and_registry() {
    let b = DatasetBundle::from_sbm(&SbmParams {
        block_sizes: vec![10, 15],
        p_within: 0.3,
        p_between: 0.05,
        directed: false,
        seed: 4,
    })
    .unwrap();
    let r = validate_bundle(&b);
    assert_eq!((r.nodes, r.classes), (25, 2));
    assert!(r.expected.is_none());
    assert!(r.to_string().contains("25 nodes / 2 classes"));

    let mut named = b.clone();
    named.name = "cora".into();
    let r = validate_bundle(&named);
    assert_eq!(r.expected.unwrap().nodes, 2708);
    assert!(r.warnings.iter().any(|w| w.starts_with("nodes: found 25, expected 2708")));
}
