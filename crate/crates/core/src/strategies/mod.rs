//! Query strategies.
//!
//! Every strategy maps the current state (graph, model outputs, labeled set,
//! candidate pool) to a node-indexed [`ScoreVector`]; the batch is then the
//! top-`b` candidates under [`select_batch`]. Higher always means "query
//! first".

mod combine;
mod regional;
mod representative;
mod select;
mod uncertainty;

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{bfs_distances, k_truss_scores, Graph, DEFAULT_DISTANCE_CAP};
use crate::prob::ProbMatrix;
use crate::rank::{adaptive_pagerank, apr_query_scores, RankParams, RankVector};

pub use combine::{chang_scores, geo_centrality_scores, min_max_normalize, ChangWeights};
pub use regional::{regional_average_proba, regional_average_scores, RegionalProbMatrix};
pub use representative::{lof_scores, mahalanobis_scores};
pub use select::select_batch;
pub use uncertainty::{entropy_scores, margin_scores};

/// Node-indexed scores. Entries outside the candidate set carry no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Self {
        ScoreVector(values)
    }

    pub fn constant(n: usize, value: f64) -> Self {
        ScoreVector(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }
}

impl Index<usize> for ScoreVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for ScoreVector {
    fn from(v: Vec<f64>) -> Self {
        ScoreVector(v)
    }
}

macro_rules! strategies {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Registry of query strategies, keyed by canonical name.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub enum Strategy {
            $($variant),*
        }

        impl Strategy {
            pub const ALL: &'static [Strategy] = &[$(Strategy::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Strategy::$variant => $name),*
                }
            }
        }

        impl FromStr for Strategy {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(Strategy::$variant),)*
                    _ => Err(Error::UnknownStrategy {
                        name: s.to_owned(),
                        available: Strategy::registry_list(),
                    }),
                }
            }
        }
    };
}

strategies! {
    Random => "random",
    Entropy => "entropy",
    Margin => "margin",
    CentralityPr => "centrality_pr",
    GeoDist => "geo_dist",
    GeoCentrality => "geo_centrality",
    RepMah => "rep_mah",
    RepLof => "rep_lof",
    KTruss => "k_truss",
    Chang => "chang",
    AprRatio => "apr_ratio",
    RegionEntropy => "region_entropy",
    RegionMargin => "region_margin",
    RegionEntropyAe => "region_entropy_ae",
    RegionMarginAe => "region_margin_ae",
}

impl Strategy {
    /// Comma-separated canonical names.
    pub fn registry_list() -> String {
        Strategy::ALL.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ")
    }

    /// Whether scoring reads the trained model's outputs.
    pub fn uses_model(self) -> bool {
        !matches!(
            self,
            Strategy::Random
                | Strategy::CentralityPr
                | Strategy::GeoDist
                | Strategy::GeoCentrality
                | Strategy::KTruss
                | Strategy::AprRatio
        )
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl TryFrom<String> for Strategy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> String {
        s.name().to_owned()
    }
}

/// Tunables shared by the strategy implementations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategySettings {
    /// LOF neighborhood size, capped at `|labeled| − 1`.
    pub lof_k: usize,
    /// Distance assigned to nodes with no path to a labeled node.
    pub distance_cap: usize,
    /// Whether a node's region includes the node itself.
    pub region_include_self: bool,
}

impl Default for StrategySettings {
    fn default() -> Self {
        StrategySettings {
            lof_k: 20,
            distance_cap: DEFAULT_DISTANCE_CAP,
            region_include_self: false,
        }
    }
}

/// Everything a strategy may read at one query round.
#[derive(Debug, Clone, Copy)]
pub struct ScoringContext<'a> {
    pub graph: &'a Graph,
    pub probs: &'a ProbMatrix,
    /// Pre-softmax model outputs, one row per node.
    pub representations: ArrayView2<'a, f64>,
    pub labeled: &'a [usize],
    pub candidates: &'a [usize],
    /// PageRank of `graph`, computed once per run.
    pub pagerank: &'a RankVector,
    pub rank_params: RankParams,
    /// Queries issued so far and the total query budget (for `chang`).
    pub iteration: usize,
    pub budget: usize,
    pub settings: StrategySettings,
}

/// Scores every candidate under `strategy`.
pub fn score(strategy: Strategy, ctx: &ScoringContext<'_>) -> Result<ScoreVector> {
    let n = ctx.graph.node_count();
    let include_self = ctx.settings.region_include_self;
    let scores = match strategy {
        Strategy::Random => ScoreVector::constant(n, 0.0),
        Strategy::Entropy => entropy_scores(ctx.probs.view())?,
        Strategy::Margin => margin_scores(ctx.probs.view())?,
        Strategy::CentralityPr => ScoreVector::new(ctx.pagerank.values().to_vec()),
        Strategy::GeoDist => geo_distance(ctx)?,
        Strategy::GeoCentrality => {
            let geo = geo_distance(ctx)?;
            let pr = ScoreVector::new(ctx.pagerank.values().to_vec());
            geo_centrality_scores(&geo, &pr, ctx.candidates)?
        }
        Strategy::RepMah => representativeness(ctx)?,
        Strategy::RepLof => local_outlier(ctx)?,
        Strategy::KTruss => ScoreVector::new(k_truss_scores(ctx.graph).into_iter().map(|k| k as f64).collect()),
        Strategy::Chang => {
            let pr = ScoreVector::new(ctx.pagerank.values().to_vec());
            let entropy = entropy_scores(ctx.probs.view())?;
            let density = representativeness(ctx)?;
            let t = ctx.iteration.min(ctx.budget);
            chang_scores(&pr, &entropy, &density, ctx.candidates, t, ctx.budget.max(1))?
        }
        Strategy::AprRatio => {
            let apr = adaptive_pagerank(ctx.graph, ctx.labeled, ctx.pagerank, ctx.rank_params)?;
            let ratios = apr_query_scores(ctx.pagerank, &apr, ctx.candidates)?;
            let mut values = vec![0.0; n];
            for (&i, r) in ctx.candidates.iter().zip(ratios) {
                values[i] = r;
            }
            ScoreVector::new(values)
        }
        Strategy::RegionEntropy => {
            let region = regional_average_proba(ctx.graph, ctx.probs.view(), include_self)?;
            entropy_scores(region.view())?
        }
        Strategy::RegionMargin => {
            let region = regional_average_proba(ctx.graph, ctx.probs.view(), include_self)?;
            margin_scores(region.view())?
        }
        Strategy::RegionEntropyAe => regional_average_scores(ctx.graph, &entropy_scores(ctx.probs.view())?, include_self)?,
        Strategy::RegionMarginAe => regional_average_scores(ctx.graph, &margin_scores(ctx.probs.view())?, include_self)?,
    };
    if let Some(&i) = ctx.candidates.iter().find(|&&i| !scores[i].is_finite()) {
        return Err(invalid("scores", format!("{strategy} produced {} for node {i}", scores[i])));
    }
    Ok(scores)
}

/// Hop distance to the nearest labeled node; every node gets the cap when
/// nothing is labeled yet.
fn geo_distance(ctx: &ScoringContext<'_>) -> Result<ScoreVector> {
    let cap = ctx.settings.distance_cap;
    if ctx.labeled.is_empty() {
        return Ok(ScoreVector::constant(ctx.graph.node_count(), cap as f64));
    }
    let d = bfs_distances(ctx.graph, ctx.labeled, cap)?;
    Ok(ScoreVector::new(d.into_iter().map(|v| v as f64).collect()))
}

/// Mahalanobis distance from the labeled representations. With fewer than
/// two labeled nodes there is no covariance; Euclidean distance to the
/// labeled mean is used instead.
fn representativeness(ctx: &ScoringContext<'_>) -> Result<ScoreVector> {
    if ctx.labeled.len() >= 2 {
        return mahalanobis_scores(ctx.representations, ctx.labeled, ctx.candidates);
    }
    Ok(distance_to_nearest_labeled(ctx))
}

/// LOF with `k = min(lof_k, |labeled| − 1)`; falls back to distance to the
/// nearest labeled representation when that leaves `k = 0`.
fn local_outlier(ctx: &ScoringContext<'_>) -> Result<ScoreVector> {
    let k = ctx.settings.lof_k.min(ctx.labeled.len().saturating_sub(1));
    if k == 0 {
        return Ok(distance_to_nearest_labeled(ctx));
    }
    lof_scores(ctx.representations, ctx.labeled, ctx.candidates, k)
}

fn distance_to_nearest_labeled(ctx: &ScoringContext<'_>) -> ScoreVector {
    let reps = ctx.representations;
    let mut values = vec![0.0; reps.nrows()];
    for &i in ctx.candidates {
        values[i] = ctx
            .labeled
            .iter()
            .map(|&j| representative::euclidean(reps.row(i), reps.row(j)))
            .fold(f64::INFINITY, f64::min);
        if !values[i].is_finite() {
            values[i] = 0.0;
        }
    }
    ScoreVector::new(values)
}
