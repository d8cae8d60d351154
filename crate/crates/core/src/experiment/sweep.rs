use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::protocol::{run_active_learning, CurveRecord, Protocol, ProtocolConfig, RunSeeds};
use crate::data::DatasetBundle;
use crate::error::{invalid, Result};
use crate::strategies::Strategy;

/// One (configuration, run index) pair of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepJob {
    pub run_id: usize,
    pub config: usize,
    pub seeds: RunSeeds,
}

/// Expands configurations into jobs; run ids are assigned in configuration
/// order, then run index.
pub fn plan_sweep(cfgs: &[ProtocolConfig]) -> Vec<SweepJob> {
    let mut jobs = Vec::new();
    for (c, cfg) in cfgs.iter().enumerate() {
        for r in 0..cfg.run_count() {
            jobs.push(SweepJob {
                run_id: jobs.len(),
                config: c,
                seeds: cfg.run_seeds(r),
            });
        }
    }
    jobs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub run_id: usize,
    pub dataset: String,
    pub strategy: Strategy,
    pub protocol: Protocol,
    pub error: String,
}

/// Mean and standard error of each metric at one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub strategy: Strategy,
    pub protocol: Protocol,
    pub iteration: usize,
    pub labeled: f64,
    pub runs: usize,
    pub mean_acc: f64,
    pub se_acc: f64,
    pub mean_micro_f1: f64,
    pub se_micro_f1: f64,
    pub mean_macro_f1: f64,
    pub se_macro_f1: f64,
    pub mean_loss: f64,
    pub se_loss: f64,
    /// `mean_acc` minus the random baseline's at the same iteration, when
    /// the sweep has one under the same protocol.
    pub delta_acc_vs_random: Option<f64>,
    pub delta_macro_f1_vs_random: Option<f64>,
    pub delta_loss_vs_random: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    /// Ordered by run id, then iteration.
    pub records: Vec<CurveRecord>,
    pub failures: Vec<RunFailure>,
}

impl SweepResult {
    pub fn summary(&self) -> Vec<SummaryRow> {
        summarize(&self.records)
    }
}

/// Runs every job of `cfgs` in parallel on the current rayon pool.
/// A failing run is recorded and the others continue.
pub fn run_sweep(bundle: &DatasetBundle, cfgs: &[ProtocolConfig]) -> Result<SweepResult> {
    if cfgs.is_empty() {
        return Err(invalid("configs", "a sweep needs at least one configuration"));
    }
    for cfg in cfgs {
        cfg.validate()?;
    }
    let jobs = plan_sweep(cfgs);
    let outcomes: Vec<_> = jobs
        .par_iter()
        .map(|job| {
            let cfg = &cfgs[job.config];
            let out = run_active_learning(bundle, cfg, job.run_id, &job.seeds);
            if let Err(e) = &out {
                log::warn!("run {} ({}) failed: {e}", job.run_id, cfg.strategy);
            }
            (job, out)
        })
        .collect();
    let mut result = SweepResult::default();
    for (job, out) in outcomes {
        let cfg = &cfgs[job.config];
        match out {
            Ok(o) => result.records.extend(o.records),
            Err(e) => result.failures.push(RunFailure {
                run_id: job.run_id,
                dataset: bundle.name.clone(),
                strategy: cfg.strategy,
                protocol: cfg.protocol,
                error: e.to_string(),
            }),
        }
    }
    Ok(result)
}

/// Sample mean and `sample-std/√n`; the error is NaN for a single value.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Groups records by dataset, protocol, strategy and iteration.
pub fn summarize(records: &[CurveRecord]) -> Vec<SummaryRow> {
    type Key = (String, Protocol, Strategy, usize);
    let mut groups: BTreeMap<Key, Vec<&CurveRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.dataset.clone(), r.protocol, r.strategy, r.iteration))
            .or_default()
            .push(r);
    }
    let mut rows: Vec<SummaryRow> = groups
        .into_iter()
        .map(|((dataset, protocol, strategy, iteration), rs)| {
            let stat = |f: fn(&CurveRecord) -> f64| mean_and_se(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
            let (mean_acc, se_acc) = stat(|r| r.accuracy);
            let (mean_micro_f1, se_micro_f1) = stat(|r| r.micro_f1);
            let (mean_macro_f1, se_macro_f1) = stat(|r| r.macro_f1);
            let (mean_loss, se_loss) = stat(|r| r.loss);
            SummaryRow {
                dataset,
                strategy,
                protocol,
                iteration,
                labeled: stat(|r| r.labeled as f64).0,
                runs: rs.len(),
                mean_acc,
                se_acc,
                mean_micro_f1,
                se_micro_f1,
                mean_macro_f1,
                se_macro_f1,
                mean_loss,
                se_loss,
                delta_acc_vs_random: None,
                delta_macro_f1_vs_random: None,
                delta_loss_vs_random: None,
            }
        })
        .collect();
    let baseline: BTreeMap<(String, Protocol, usize), (f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.strategy == Strategy::Random)
        .map(|r| ((r.dataset.clone(), r.protocol, r.iteration), (r.mean_acc, r.mean_macro_f1, r.mean_loss)))
        .collect();
    for r in &mut rows {
        if let Some(&(acc, f1, loss)) = baseline.get(&(r.dataset.clone(), r.protocol, r.iteration)) {
            r.delta_acc_vs_random = Some(r.mean_acc - acc);
            r.delta_macro_f1_vs_random = Some(r.mean_macro_f1 - f1);
            r.delta_loss_vs_random = Some(r.mean_loss - loss);
        }
    }
    rows
}

/// Last-iteration summary row of each (dataset, protocol, strategy).
pub fn final_points(rows: &[SummaryRow]) -> Vec<&SummaryRow> {
    let mut last: BTreeMap<(&str, Protocol, Strategy), &SummaryRow> = BTreeMap::new();
    for r in rows {
        let e = last.entry((r.dataset.as_str(), r.protocol, r.strategy)).or_insert(r);
        if r.iteration > e.iteration {
            *e = r;
        }
    }
    last.into_values().collect()
}

fn write_rows<W: Write, T: Serialize>(out: W, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `run_id,dataset,strategy,protocol,iteration,labeled,accuracy,micro_f1,macro_f1,loss`
pub fn write_curves_csv<W: Write>(out: W, records: &[CurveRecord]) -> Result<()> {
    if records.is_empty() {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CURVE_HEADER)?;
        w.flush()?;
        return Ok(());
    }
    write_rows(out, records)
}

pub const CURVE_HEADER: [&str; 10] = [
    "run_id", "dataset", "strategy", "protocol", "iteration", "labeled", "accuracy", "micro_f1", "macro_f1", "loss",
];

pub fn write_summary_csv<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    write_rows(out, rows)
}

/// `run_id,dataset,strategy,protocol,error`
pub fn write_failures_csv<W: Write>(out: W, failures: &[RunFailure]) -> Result<()> {
    if failures.is_empty() {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["run_id", "dataset", "strategy", "protocol", "error"])?;
        w.flush()?;
        return Ok(());
    }
    write_rows(out, failures)
}
