use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graph-al"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    /// A generated 3x20 planted partition plus a small config next to it.
    fn new(extra: &str) -> Workspace {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("data");
        let o = run(&[
            "gen-sbm",
            "--out",
            data.to_str().unwrap(),
            "--blocks",
            "20,20,20",
            "--p-within",
            "0.3",
            "--p-between",
            "0.02",
            "--seed",
            "3",
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let config = format!(
            "[dataset]\npath = \"data\"\nname = \"sbm\"\n\n[protocol]\nstop = {{ labeled_count = 4 }}\nbatch_size = 2\nrepetitions = 2\n\n[gcn]\nepochs = 20\n\n[output]\ndir = \"out\"\n{extra}"
        );
        fs::write(dir.path().join("exp.toml"), config).unwrap();
        Workspace { dir }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn config(&self) -> String {
        self.path("exp.toml").to_str().unwrap().to_owned()
    }

    fn read(&self, rel: &str) -> String {
        fs::read_to_string(self.path(rel)).unwrap()
    }

    fn manifest(&self, rel: &str) -> serde_json::Value {
        serde_json::from_str(&self.read(rel)).unwrap()
    }
}

fn listing(root: &Path) -> BTreeSet<PathBuf> {
    let mut out = BTreeSet::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p.clone());
            }
            out.insert(p);
        }
    }
    out
}

#[test]
fn gen_sbm_then_validate_echoes_counts() {
    let ws = Workspace::new("");
    let o = run(&["validate", ws.path("data").to_str().unwrap(), "--name", "sbm"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("60 nodes / 3 classes"), "{}", stdout(&o));

    // registry mismatch is a warning, not a failure
    let o = run(&["validate", ws.path("data").to_str().unwrap(), "--name", "cora"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("expected 2708"), "{}", stdout(&o));
}

#[test]
fn validate_fails_on_missing_or_broken_files() {
    let ws = Workspace::new("");
    fs::remove_file(ws.path("data/labels.tsv")).unwrap();
    let o = run(&["validate", ws.path("data").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    fs::write(ws.path("data/labels.tsv"), "n0\n").unwrap();
    assert_eq!(code(&run(&["validate", ws.path("data").to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["validate", ws.path("nowhere").to_str().unwrap()])), 2);
}

#[test]
fn run_writes_curves_summary_and_manifest() {
    let ws = Workspace::new("");
    let o = run(&["run", "--config", &ws.config(), "--strategy", "region_margin"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let curves = ws.read("out/curves.csv");
    let mut lines = curves.lines();
    assert_eq!(
        lines.next().unwrap(),
        "run_id,dataset,strategy,protocol,iteration,labeled,accuracy,micro_f1,macro_f1,loss"
    );
    assert_eq!(lines.count(), 2 * 3);
    assert!(curves.contains(",region_margin,"));
    assert_eq!(ws.read("out/summary.csv").lines().count(), 1 + 3);
    let m = ws.manifest("out/manifest.json");
    assert_eq!(m["status"], "completed");
    assert_eq!(m["runs"].as_array().unwrap().len(), 2);
    assert_eq!(m["dataset_sha256"].as_object().unwrap().len(), 2);
    assert!(m["finished"].is_string());
}

#[test]
fn unknown_strategy_lists_registry() {
    let ws = Workspace::new("");
    let o = run(&["run", "--config", &ws.config(), "--strategy", "region_magrin"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("region_magrin") && err.contains("region_entropy_ae") && err.contains("apr_ratio"), "{err}");
    assert!(!ws.path("out").exists());
}

#[test]
fn flags_override_config_and_land_in_manifest() {
    let ws = Workspace::new("");
    let o = run(&["run", "--config", &ws.config(), "--reps", "3", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m = ws.manifest("out/manifest.json");
    assert_eq!(m["config"]["protocol"]["repetitions"], 3);
    assert_eq!(m["config"]["protocol"]["seed"], 7);
    assert_eq!(m["runs"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_config_reports_the_field() {
    let ws = Workspace::new("[strategy]\nnames = [\"random\"]\nsettings = { lof = 3 }\n");
    let o = run(&["run", "--config", &ws.config()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("lof"), "{}", stderr(&o));

    let ws = Workspace::new("");
    let o = run(&["run", "--config", &ws.config(), "--reps", "0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("repetitions"), "{}", stderr(&o));
    assert_eq!(code(&run(&["run", "--config", ws.path("none.toml").to_str().unwrap()])), 2);
}

#[test]
fn sweep_reproduces_from_its_manifest() {
    let ws = Workspace::new("");
    let o = run(&[
        "sweep",
        "--config",
        &ws.config(),
        "--strategy",
        "random",
        "--strategy",
        "entropy",
        "--strategy",
        "apr_ratio",
        "--workers",
        "3",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = ws.read("out/curves.csv");
    assert_eq!(first.lines().count(), 1 + 3 * 2 * 3);

    let manifest = ws.path("out/manifest.json");
    let again = ws.path("again");
    let o = run(&[
        "sweep",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
        "--workers",
        "1",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(ws.read("again/curves.csv"), first);
    assert_eq!(ws.read("again/summary.csv"), ws.read("out/summary.csv"));
}

#[test]
fn run_only_writes_inside_output_dir() {
    let ws = Workspace::new("");
    let before = listing(ws.dir.path());
    let o = run(&["run", "--config", &ws.config(), "--dump-ranks"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = fs::canonicalize(ws.path("out")).unwrap();
    let root = fs::canonicalize(ws.dir.path()).unwrap();
    let after: BTreeSet<PathBuf> = listing(&root).into_iter().filter(|p| !p.starts_with(&out)).collect();
    let before: BTreeSet<PathBuf> = before
        .into_iter()
        .map(|p| root.join(p.strip_prefix(ws.dir.path()).unwrap()))
        .collect();
    assert_eq!(after, before.into_iter().filter(|p| !p.starts_with(&out)).collect());

    let ranks = ws.read("out/ranks.csv");
    assert_eq!(ranks.lines().next().unwrap(), "node_id,pr,apr,ratio");
    assert_eq!(ranks.lines().count(), 61);
}

#[test]
fn failing_runs_exit_one_and_keep_partial_output() {
    // 60 nodes cannot hold a 1000-node test set
    let ws = Workspace::new("");
    let cfg = ws.read("exp.toml").replace("[protocol]\n", "[protocol]\nprotocol = \"fixed-split\"\nsplit = { test_sets = 1, validation_sets = 1, initial_sets = 2 }\n");
    fs::write(ws.path("exp.toml"), cfg).unwrap();
    let o = run(&["run", "--config", &ws.config()]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let m = ws.manifest("out/manifest.json");
    assert_eq!(m["status"], "failed");
    assert_eq!(m["failed_runs"], 2);
    assert_eq!(ws.read("out/failures.csv").lines().count(), 3);
    assert_eq!(ws.read("out/curves.csv").lines().count(), 1);
}

#[test]
fn distance_curve_grid_and_seed() {
    let ws = Workspace::new("");
    let o = run(&["analyze-distance", "--config", &ws.config(), "--seed", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = ws.read("out/distance.csv");
    assert_eq!(first.lines().next().unwrap(), "fraction,mean_distance,se");
    assert_eq!(first.lines().count(), 16);
    assert_eq!(code(&run(&["analyze-distance", "--config", &ws.config(), "--seed", "4"])), 0);
    assert_eq!(ws.read("out/distance.csv"), first);

    let ws = Workspace::new("[distance]\nfractions = [0.1, 0.5, 1.0]\n");
    assert_eq!(code(&run(&["analyze-distance", "--config", &ws.config()])), 0);
    let text = ws.read("out/distance.csv");
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[..2], ["1.0", "0.0"]);

    let ws = Workspace::new("[distance]\nfractions = [0.0]\n");
    assert_eq!(code(&run(&["analyze-distance", "--config", &ws.config()])), 2);
}
