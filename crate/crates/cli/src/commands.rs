use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use graph_al::data::{load_dataset_dir, validate_bundle, DatasetBundle, LoadOptions};
use graph_al::experiment::{
    distance_to_sampled_curve, initial_seed, plan_sweep, run_sweep, write_curves_csv, write_distance_csv,
    write_failures_csv, write_summary_csv, ProtocolConfig,
};
use graph_al::graph::SbmParams;
use graph_al::rank::{adaptive_pagerank, pagerank};

use crate::config::{parse_strategies, Config};
use crate::manifest::{ManifestRun, RunManifest, Status};
use crate::{CliError, RunArgs};

pub const CURVES_FILE: &str = "curves.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const RANKS_FILE: &str = "ranks.csv";
pub const DISTANCE_FILE: &str = "distance.csv";

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn load_bundle(cfg: &Config) -> Result<DatasetBundle, CliError> {
    let dir = &cfg.dataset.path;
    if !dir.is_dir() {
        return Err(usage(format!("dataset directory {} does not exist", dir.display())));
    }
    let opts = LoadOptions {
        name: cfg.dataset.name.clone(),
        drop_isolated: cfg.dataset.drop_isolated,
        ..LoadOptions::default()
    };
    let (bundle, report) = load_dataset_dir(dir, &opts).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    log::info!("loaded {}: {} nodes, {} classes ({report:?})", bundle.name, bundle.graph.node_count(), bundle.num_classes());
    Ok(bundle)
}

/// Creates `dir` and pins config paths to absolute form so the manifest
/// stays valid wherever it is read from.
fn prepare_output(cfg: &mut Config, out: Option<PathBuf>) -> Result<PathBuf, CliError> {
    if let Some(out) = out {
        cfg.output.dir = out;
    }
    fs::create_dir_all(&cfg.output.dir).map_err(|e| runtime(format!("{}: {e}", cfg.output.dir.display())))?;
    cfg.output.dir = fs::canonicalize(&cfg.output.dir).map_err(runtime)?;
    cfg.dataset.path = fs::canonicalize(&cfg.dataset.path).map_err(usage)?;
    Ok(cfg.output.dir.clone())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| runtime(format!("{}: {e}", path.display())))
}

pub fn run(args: &RunArgs, sweep: bool) -> Result<(), CliError> {
    let mut cfg = Config::load(&args.config)?;
    if !args.strategy.is_empty() {
        parse_strategies(&args.strategy)?;
        cfg.strategy.names = args.strategy.clone();
    }
    if let Some(r) = args.reps {
        cfg.protocol.repetitions = r;
    }
    if let Some(s) = args.seed {
        cfg.protocol.seed = s;
    }
    cfg.output.dump_ranks |= args.dump_ranks;

    let strategies = cfg.strategies()?;
    if !sweep && strategies.len() != 1 {
        return Err(usage(format!(
            "`run` takes one strategy, got {}; use `sweep` for several",
            strategies.len()
        )));
    }
    let cfgs: Vec<ProtocolConfig> = strategies.iter().map(|&s| cfg.protocol_config(s)).collect();
    for c in &cfgs {
        c.validate().map_err(usage)?;
    }
    if args.workers == Some(0) {
        return Err(usage("--workers must be at least 1"));
    }

    let bundle = load_bundle(&cfg)?;
    let out = prepare_output(&mut cfg, args.out.clone())?;
    let runs = plan_sweep(&cfgs)
        .into_iter()
        .map(|job| ManifestRun {
            run_id: job.run_id,
            strategy: cfgs[job.config].strategy.name().to_owned(),
            seeds: job.seeds,
        })
        .collect();
    let command = if sweep { "sweep" } else { "run" };
    let mut manifest = RunManifest::new(command, cfg.clone(), runs).map_err(runtime)?;
    manifest.outputs = [CURVES_FILE, SUMMARY_FILE, FAILURES_FILE].iter().map(|f| out.join(f)).collect();
    if cfg.output.dump_ranks {
        manifest.outputs.push(out.join(RANKS_FILE));
    }
    manifest.write(&out).map_err(runtime)?;

    let outcome = execute(&bundle, &cfg, &cfgs, &out, args.workers);
    let status = match &outcome {
        Ok(0) => Status::Completed,
        Ok(failed) => {
            manifest.failed_runs = *failed;
            Status::Failed
        }
        Err(_) => Status::Failed,
    };
    manifest.finish(status);
    manifest.write(&out).map_err(runtime)?;
    match outcome? {
        0 => Ok(()),
        failed => Err(runtime(format!(
            "{failed} of {} runs failed; see {}",
            manifest.runs.len(),
            out.join(FAILURES_FILE).display()
        ))),
    }
}

/// Runs the sweep and writes its outputs; returns the number of failed runs.
fn execute(
    bundle: &DatasetBundle,
    cfg: &Config,
    cfgs: &[ProtocolConfig],
    out: &Path,
    workers: Option<usize>,
) -> Result<usize, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(runtime)?;
    let result = pool.install(|| run_sweep(bundle, cfgs)).map_err(runtime)?;

    let mut w = create(&out.join(CURVES_FILE))?;
    write_curves_csv(&mut w, &result.records).map_err(runtime)?;
    w.flush().map_err(runtime)?;
    let mut w = create(&out.join(SUMMARY_FILE))?;
    write_summary_csv(&mut w, &result.summary()).map_err(runtime)?;
    w.flush().map_err(runtime)?;
    let mut w = create(&out.join(FAILURES_FILE))?;
    write_failures_csv(&mut w, &result.failures).map_err(runtime)?;
    w.flush().map_err(runtime)?;
    for f in &result.failures {
        log::warn!("run {} ({}) failed: {}", f.run_id, f.strategy, f.error);
    }
    if cfg.output.dump_ranks {
        write_ranks(bundle, &cfgs[0], &out.join(RANKS_FILE))?;
    }
    Ok(result.failures.len())
}

/// PageRank and adaptive PageRank per node, with run 0's seed nodes (one
/// per class, drawn from all nodes) as the labeled set.
fn write_ranks(bundle: &DatasetBundle, cfg: &ProtocolConfig, path: &Path) -> Result<(), CliError> {
    let g = &bundle.graph;
    let all: Vec<usize> = (0..g.node_count()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run_seeds(0).initial);
    let labeled = initial_seed(&bundle.labels, &bundle.class_names, &all, &mut rng).map_err(runtime)?;
    let pr = pagerank(g, cfg.rank).map_err(runtime)?;
    let apr = adaptive_pagerank(g, &labeled, &pr, cfg.rank).map_err(runtime)?;
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["node_id", "pr", "apr", "ratio"]).map_err(runtime)?;
    for i in 0..g.node_count() {
        let (p, a) = (pr.values()[i], apr.values()[i]);
        w.serialize((g.node_id(i), p, a, p / a)).map_err(runtime)?;
    }
    w.flush().map_err(runtime)
}

pub fn analyze_distance(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), CliError> {
    let mut cfg = Config::load(config)?;
    if let Some(s) = seed {
        cfg.protocol.seed = s;
    }
    let grid = cfg.distance.grid();
    let bundle = load_bundle(&cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.protocol.seed);
    let d = &cfg.distance;
    let points = distance_to_sampled_curve(&bundle.graph, &grid, d.repetitions, d.cap, &mut rng).map_err(usage)?;

    let dir = prepare_output(&mut cfg, out)?;
    let mut manifest = RunManifest::new("analyze-distance", cfg, Vec::new()).map_err(runtime)?;
    manifest.outputs = vec![dir.join(DISTANCE_FILE)];
    manifest.write(&dir).map_err(runtime)?;
    let mut w = create(&dir.join(DISTANCE_FILE))?;
    let written = write_distance_csv(&mut w, &points).map_err(runtime).and_then(|()| w.flush().map_err(runtime));
    manifest.finish(if written.is_ok() { Status::Completed } else { Status::Failed });
    manifest.write(&dir).map_err(runtime)?;
    written
}

pub fn validate(dir: &Path, name: Option<String>) -> Result<(), CliError> {
    if !dir.is_dir() {
        return Err(usage(format!("dataset directory {} does not exist", dir.display())));
    }
    let opts = LoadOptions {
        name,
        ..LoadOptions::default()
    };
    let (bundle, align) = load_dataset_dir(dir, &opts).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    print!("{}", validate_bundle(&bundle));
    println!(
        "alignment: {} unlabeled dropped, {} label-only, {} isolated dropped, {} content rows without node, {} nodes without content",
        align.unlabeled_dropped,
        align.label_only_nodes,
        align.isolated_dropped,
        align.content_without_node,
        align.node_without_content
    );
    Ok(())
}

pub fn gen_sbm(out: &Path, blocks: Vec<usize>, p_within: f64, p_between: f64, directed: bool, seed: u64) -> Result<(), CliError> {
    let params = SbmParams {
        block_sizes: blocks,
        p_within,
        p_between,
        directed,
        seed,
    };
    let bundle = DatasetBundle::from_sbm(&params).map_err(usage)?;
    bundle.write_dir(out).map_err(|e| runtime(format!("{}: {e}", out.display())))?;
    println!(
        "wrote {}: {} nodes, {} edges, {} classes",
        out.display(),
        bundle.graph.node_count(),
        bundle.graph.edge_count(),
        bundle.num_classes()
    );
    Ok(())
}
