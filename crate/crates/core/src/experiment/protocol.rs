use std::sync::Arc;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::{ALState, GroundTruthOracle, Oracle};
use crate::data::DatasetBundle;
use crate::error::{invalid, Error, Result};
use crate::gcn::{self, neighbor_label_features, FeatureKind, FeatureMatrix, GcnConfig, TrainedModel};
use crate::graph::{normalized_adjacency, NormalizedAdjacency};
use crate::metrics::{evaluate, EvalReport};
use crate::rank::{pagerank, RankParams};
use crate::strategies::{score, select_batch, ScoringContext, Strategy, StrategySettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// Seeded with one node per class; evaluated on every unlabeled node.
    FractionBudget,
    /// Reserved test and validation sets; evaluated on the test set.
    FixedSplit,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::FractionBudget => "fraction-budget",
            Protocol::FixedSplit => "fixed-split",
        }
    }
}

/// When a run stops querying.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Stop once this share of all nodes is labeled, seeds included.
    LabeledFraction(f64),
    /// Stop after this many queries beyond the seeds.
    LabeledCount(usize),
}

/// Sizes and nesting of the fixed-split protocol. Runs are indexed
/// test set, then validation set, then initial labeled set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub test_size: usize,
    pub validation_size: usize,
    pub test_sets: usize,
    pub validation_sets: usize,
    pub initial_sets: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            test_size: 1000,
            validation_size: 500,
            test_sets: 2,
            validation_sets: 2,
            initial_sets: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub protocol: Protocol,
    pub strategy: Strategy,
    pub batch_size: usize,
    pub stop: StopRule,
    pub features: FeatureKind,
    /// Row-normalize neighbor-label counts.
    pub normalize_features: bool,
    /// Runs per configuration under the fraction-budget protocol; the
    /// fixed-split protocol runs its full nesting instead.
    pub repetitions: usize,
    pub split: SplitConfig,
    pub gcn: GcnConfig,
    /// Start each round from the previous round's weights.
    pub warm_start: bool,
    pub rank: RankParams,
    pub settings: StrategySettings,
    /// Base seed; every run seed is derived from it and the run index.
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            protocol: Protocol::FractionBudget,
            strategy: Strategy::Random,
            batch_size: 1,
            stop: StopRule::LabeledFraction(0.15),
            features: FeatureKind::NeighborLabels,
            normalize_features: false,
            repetitions: 20,
            split: SplitConfig::default(),
            gcn: GcnConfig::default(),
            warm_start: false,
            rank: RankParams::default(),
            settings: StrategySettings::default(),
            seed: 0,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(invalid("batch_size", "must be at least 1"));
        }
        match self.stop {
            StopRule::LabeledFraction(f) if !(f > 0.0 && f < 1.0) => {
                return Err(invalid("stop", "labeled fraction must be in (0, 1)"));
            }
            _ => {}
        }
        if self.protocol == Protocol::FractionBudget && self.repetitions == 0 {
            return Err(invalid("repetitions", "must be at least 1"));
        }
        if self.protocol == Protocol::FixedSplit {
            let s = self.split;
            if s.test_size == 0 {
                return Err(invalid("split", "test_size must be at least 1"));
            }
            if s.test_sets == 0 || s.validation_sets == 0 || s.initial_sets == 0 {
                return Err(invalid("split", "nesting counts must be at least 1"));
            }
        }
        if self.settings.distance_cap == 0 {
            return Err(invalid("distance_cap", "must be at least 1"));
        }
        self.gcn.validate()?;
        self.rank.validate()
    }

    /// Number of runs this configuration expands to.
    pub fn run_count(&self) -> usize {
        match self.protocol {
            Protocol::FractionBudget => self.repetitions,
            Protocol::FixedSplit => self.split.test_sets * self.split.validation_sets * self.split.initial_sets,
        }
    }

    /// Seeds of run `index`. They depend on the base seed and the index
    /// only, so configurations that differ in strategy share splits, seed
    /// nodes and model initializations.
    pub fn run_seeds(&self, index: usize) -> RunSeeds {
        let base = self.seed;
        match self.protocol {
            Protocol::FractionBudget => {
                let r = index as u64;
                RunSeeds {
                    index,
                    test: 0,
                    validation: 0,
                    initial: mix(base, &[SEED_INITIAL, r]),
                    model: mix(base, &[SEED_MODEL, r]),
                    select: mix(base, &[SEED_SELECT, r]),
                }
            }
            Protocol::FixedSplit => {
                let s = self.split;
                let t = (index / (s.validation_sets * s.initial_sets)) as u64;
                let v = ((index / s.initial_sets) % s.validation_sets) as u64;
                let i = (index % s.initial_sets) as u64;
                RunSeeds {
                    index,
                    test: mix(base, &[SEED_TEST, t]),
                    validation: mix(base, &[SEED_VALIDATION, t, v]),
                    initial: mix(base, &[SEED_INITIAL, t, v, i]),
                    model: mix(base, &[SEED_MODEL, t, v, i]),
                    select: mix(base, &[SEED_SELECT, t, v, i]),
                }
            }
        }
    }
}

const SEED_TEST: u64 = 1;
const SEED_VALIDATION: u64 = 2;
const SEED_INITIAL: u64 = 3;
const SEED_MODEL: u64 = 4;
const SEED_SELECT: u64 = 5;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn mix(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix(base), |h, &p| splitmix(h ^ splitmix(p)))
}

/// Seeds of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSeeds {
    pub index: usize,
    pub test: u64,
    pub validation: u64,
    pub initial: u64,
    pub model: u64,
    pub select: u64,
}

/// One evaluation point of a learning curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub run_id: usize,
    pub dataset: String,
    pub strategy: Strategy,
    pub protocol: Protocol,
    pub iteration: usize,
    pub labeled: usize,
    pub accuracy: f64,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub loss: f64,
}

impl CurveRecord {
    fn new(bundle: &DatasetBundle, cfg: &ProtocolConfig, run_id: usize, iteration: usize, labeled: usize, r: &EvalReport) -> Self {
        CurveRecord {
            run_id,
            dataset: bundle.name.clone(),
            strategy: cfg.strategy,
            protocol: cfg.protocol,
            iteration,
            labeled,
            accuracy: r.accuracy,
            micro_f1: r.micro_f1,
            macro_f1: r.macro_f1,
            loss: r.mean_loss,
        }
    }
}

/// Curve and query trace of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub records: Vec<CurveRecord>,
    /// Seed nodes followed by queried nodes, as `(node, iteration)`; seeds
    /// carry iteration 0.
    pub history: Vec<(usize, usize)>,
    pub seed_count: usize,
    pub test: Vec<usize>,
    pub validation: Vec<usize>,
}

/// One uniformly random pool node per class, in class order.
pub fn initial_seed<R: rand::Rng + ?Sized>(
    labels: &[usize],
    class_names: &[String],
    pool: &[usize],
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut by_class = vec![Vec::new(); class_names.len()];
    for &i in pool {
        let &c = labels.get(i).ok_or(Error::MissingLabel(i))?;
        by_class
            .get_mut(c)
            .ok_or(Error::ClassOutOfRange {
                class: c,
                num_classes: class_names.len(),
            })?
            .push(i);
    }
    by_class
        .iter()
        .enumerate()
        .map(|(c, nodes)| nodes.choose(rng).copied().ok_or_else(|| Error::ClassAbsent(class_names[c].clone())))
        .collect()
}

/// Runs one active-learning simulation against the ground-truth oracle.
pub fn run_active_learning(bundle: &DatasetBundle, cfg: &ProtocolConfig, run_id: usize, seeds: &RunSeeds) -> Result<RunOutcome> {
    let mut oracle = GroundTruthOracle::new(&bundle.labels);
    run_with_oracle(bundle, cfg, run_id, seeds, &mut oracle)
}

/// [`run_active_learning`] with a caller-supplied oracle.
pub fn run_with_oracle(
    bundle: &DatasetBundle,
    cfg: &ProtocolConfig,
    run_id: usize,
    seeds: &RunSeeds,
    oracle: &mut dyn Oracle,
) -> Result<RunOutcome> {
    cfg.validate()?;
    bundle.check()?;
    let g = &bundle.graph;
    let n = g.node_count();
    let num_classes = bundle.num_classes();

    let (test, validation) = match cfg.protocol {
        Protocol::FractionBudget => (Vec::new(), Vec::new()),
        Protocol::FixedSplit => reserve_splits(n, num_classes, &cfg.split, seeds)?,
    };
    let mut state = ALState::new(n, &test, &validation)?;

    let mut init_rng = ChaCha8Rng::seed_from_u64(seeds.initial);
    let seed_nodes = initial_seed(&bundle.labels, &bundle.class_names, state.pool(), &mut init_rng)?;
    for &i in &seed_nodes {
        state.query(i, 0, oracle)?;
    }
    let budget = match cfg.stop {
        StopRule::LabeledCount(q) => q,
        StopRule::LabeledFraction(f) => ((f * n as f64).ceil() as usize).saturating_sub(seed_nodes.len()),
    };
    if budget > state.pool().len() {
        return Err(Error::PoolExhausted {
            needed: budget,
            available: state.pool().len(),
        });
    }

    let static_features = match cfg.features {
        FeatureKind::BagOfWords => Some(
            bundle
                .features
                .as_ref()
                .ok_or_else(|| invalid("features", format!("dataset `{}` has no content features", bundle.name)))?,
        ),
        FeatureKind::NeighborLabels => None,
    };
    let adjacency = Arc::new(normalized_adjacency(g, cfg.gcn.adjacency));
    let pr = pagerank(g, cfg.rank)?;
    let mut select_rng = ChaCha8Rng::seed_from_u64(seeds.select);

    let mut records = Vec::new();
    let mut previous: Option<TrainedModel> = None;
    let mut queried = 0;
    let mut iteration = 0;
    loop {
        state.check_invariants()?;
        let dynamic;
        let x = match static_features {
            Some(x) => x,
            None => {
                dynamic = neighbor_label_features(g, state.known_labels(), num_classes, cfg.normalize_features)?;
                &dynamic
            }
        };
        let model = train_round(&adjacency, x, &state.training_pairs(), num_classes, cfg, seeds, iteration, previous.as_ref())?;
        let probs = model.predict_proba();
        let eval_set = match cfg.protocol {
            Protocol::FractionBudget => state.pool().to_vec(),
            Protocol::FixedSplit => state.test().to_vec(),
        };
        let report = evaluate(&probs, &bundle.labels, &eval_set)?;
        records.push(CurveRecord::new(bundle, cfg, run_id, iteration, state.labeled_count(), &report));
        if queried >= budget {
            break;
        }

        let b = cfg.batch_size.min(budget - queried);
        let labeled = state.labeled_nodes();
        let ctx = ScoringContext {
            graph: g,
            probs: &probs,
            representations: model.representations(),
            labeled: &labeled,
            candidates: state.pool(),
            pagerank: &pr,
            rank_params: cfg.rank,
            iteration: queried,
            budget,
            settings: cfg.settings,
        };
        let scores = score(cfg.strategy, &ctx)?;
        let batch = select_batch(&scores, state.pool(), b, &mut select_rng)?;
        iteration += 1;
        for i in batch {
            state.query(i, iteration, oracle)?;
        }
        queried += b;
        if cfg.warm_start {
            previous = Some(model);
        }
    }
    state.check_invariants()?;

    Ok(RunOutcome {
        records,
        history: state.history().to_vec(),
        seed_count: seed_nodes.len(),
        test,
        validation,
    })
}

#[allow(clippy::too_many_arguments)]
fn train_round(
    adjacency: &Arc<NormalizedAdjacency>,
    x: &FeatureMatrix,
    labels: &[(usize, usize)],
    num_classes: usize,
    cfg: &ProtocolConfig,
    seeds: &RunSeeds,
    iteration: usize,
    previous: Option<&TrainedModel>,
) -> Result<TrainedModel> {
    let gcn_cfg = GcnConfig {
        seed: mix(seeds.model, &[iteration as u64]),
        ..cfg.gcn
    };
    match previous {
        Some(m) => gcn::train_warm(Arc::clone(adjacency), x, labels, num_classes, &gcn_cfg, m.weights()),
        None => gcn::train_with_adjacency(Arc::clone(adjacency), x, labels, num_classes, &gcn_cfg),
    }
}

/// Draws the test set, then the validation set from what remains.
fn reserve_splits(n: usize, num_classes: usize, split: &SplitConfig, seeds: &RunSeeds) -> Result<(Vec<usize>, Vec<usize>)> {
    let needed = split.test_size + split.validation_size + num_classes;
    if n < needed {
        return Err(invalid(
            "split",
            format!("fixed-split needs at least {needed} nodes (test + validation + classes), graph has {n}"),
        ));
    }
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(&mut ChaCha8Rng::seed_from_u64(seeds.test));
    let mut rest = nodes.split_off(split.test_size);
    let mut test = nodes;
    rest.sort_unstable();
    rest.shuffle(&mut ChaCha8Rng::seed_from_u64(seeds.validation));
    rest.truncate(split.validation_size);
    let mut validation = rest;
    test.sort_unstable();
    validation.sort_unstable();
    Ok((test, validation))
}
