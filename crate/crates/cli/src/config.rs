//! Experiment configuration file.
//!
//! ```toml
//! [dataset]
//! path = "data/cora"        # relative to the config file
//! name = "cora"             # registry key; defaults to the directory name
//! drop_isolated = true      # defaults to the registry entry
//!
//! [protocol]
//! protocol = "fraction-budget"   # or "fixed-split"
//! batch_size = 1
//! stop = { labeled_fraction = 0.15 }   # or { labeled_count = 200 }
//! features = "neighbor-labels"   # or "bag-of-words"
//! repetitions = 20
//! seed = 0
//!
//! [gcn]
//! epochs = 200
//!
//! [strategy]
//! names = ["random", "region_margin"]
//!
//! [output]
//! dir = "results/cora"
//!
//! [distance]
//! lo = 0.005
//! hi = 0.15
//! points = 15
//! ```
//!
//! Every section except `[dataset]` is optional. Unknown keys are errors.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use graph_al::experiment::{Protocol, ProtocolConfig, SplitConfig, StopRule};
use graph_al::gcn::{FeatureKind, GcnConfig};
use graph_al::graph::DEFAULT_DISTANCE_CAP;
use graph_al::rank::RankParams;
use graph_al::strategies::{Strategy, StrategySettings};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub dataset: DatasetSection,
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub gcn: GcnConfig,
    #[serde(default)]
    pub strategy: StrategySection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub distance: DistanceSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub path: PathBuf,
    pub name: Option<String>,
    pub drop_isolated: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolSection {
    pub protocol: Protocol,
    pub batch_size: usize,
    pub stop: StopRule,
    pub features: FeatureKind,
    pub normalize_features: bool,
    pub repetitions: usize,
    pub split: SplitConfig,
    pub warm_start: bool,
    pub rank: RankParams,
    pub seed: u64,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        let p = ProtocolConfig::default();
        ProtocolSection {
            protocol: p.protocol,
            batch_size: p.batch_size,
            stop: p.stop,
            features: p.features,
            normalize_features: p.normalize_features,
            repetitions: p.repetitions,
            split: p.split,
            warm_start: p.warm_start,
            rank: p.rank,
            seed: p.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategySection {
    pub names: Vec<String>,
    pub settings: StrategySettings,
}

impl Default for StrategySection {
    fn default() -> Self {
        StrategySection {
            names: vec![Strategy::Random.name().to_owned()],
            settings: StrategySettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Also write `ranks.csv` (PageRank and adaptive PageRank per node).
    pub dump_ranks: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("results"),
            dump_ranks: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistanceSection {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    /// Explicit grid; replaces `lo`/`hi`/`points` when set.
    pub fractions: Option<Vec<f64>>,
    pub repetitions: usize,
    pub cap: usize,
}

impl Default for DistanceSection {
    fn default() -> Self {
        DistanceSection {
            lo: 0.005,
            hi: 0.15,
            points: 15,
            fractions: None,
            repetitions: 20,
            cap: DEFAULT_DISTANCE_CAP,
        }
    }
}

impl DistanceSection {
    pub fn grid(&self) -> Vec<f64> {
        match &self.fractions {
            Some(f) => f.clone(),
            None => graph_al::experiment::fraction_grid(self.lo, self.hi, self.points),
        }
    }
}

impl Config {
    /// Reads a TOML config, or the config recorded in a run manifest when
    /// the file ends in `.json`. Relative paths resolve against the file's
    /// directory.
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let mut cfg: Config = if path.extension().is_some_and(|e| e == "json") {
            let m: crate::manifest::RunManifest = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            m.config
        } else {
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        if cfg.dataset.path.is_relative() {
            cfg.dataset.path = base.join(&cfg.dataset.path);
        }
        if cfg.output.dir.is_relative() {
            cfg.output.dir = base.join(&cfg.output.dir);
        }
        Ok(cfg)
    }

    /// Parsed strategy names, in file order.
    pub fn strategies(&self) -> Result<Vec<Strategy>, CliError> {
        if self.strategy.names.is_empty() {
            return Err(CliError::Usage("strategy.names: at least one strategy is required".into()));
        }
        parse_strategies(&self.strategy.names)
    }

    pub fn protocol_config(&self, strategy: Strategy) -> ProtocolConfig {
        let p = &self.protocol;
        ProtocolConfig {
            protocol: p.protocol,
            strategy,
            batch_size: p.batch_size,
            stop: p.stop,
            features: p.features,
            normalize_features: p.normalize_features,
            repetitions: p.repetitions,
            split: p.split,
            gcn: self.gcn,
            warm_start: p.warm_start,
            rank: p.rank,
            settings: self.strategy.settings,
            seed: p.seed,
        }
    }
}

/// `all` expands to the whole registry.
pub fn parse_strategies(names: &[String]) -> Result<Vec<Strategy>, CliError> {
    let mut out = Vec::new();
    for name in names {
        if name == "all" {
            out.extend_from_slice(Strategy::ALL);
            continue;
        }
        out.push(name.parse::<Strategy>().map_err(|e| CliError::Usage(e.to_string()))?);
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|s| seen.insert(*s));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_takes_defaults() {
        let cfg: Config = toml::from_str("[dataset]\npath = \"d\"\n").unwrap();
        assert_eq!(cfg.protocol, ProtocolSection::default());
        assert_eq!(cfg.strategies().unwrap(), vec![Strategy::Random]);
        assert_eq!(cfg.distance.grid().len(), 15);
        let p = cfg.protocol_config(Strategy::Margin);
        assert_eq!(p, ProtocolConfig { strategy: Strategy::Margin, ..ProtocolConfig::default() });
    }

    #[test]
    fn nested_tables_and_stop_rules() {
        let cfg: Config = toml::from_str(
            r#"
            [dataset]
            path = "d"
            [protocol]
            protocol = "fixed-split"
            stop = { labeled_count = 200 }
            features = "bag-of-words"
            split = { test_size = 10, initial_sets = 1 }
            [gcn]
            epochs = 5
            adjacency = "directed-split"
            [strategy]
            names = ["all", "random"]
            settings = { lof_k = 3 }
            "#,
        )
        .unwrap();
        assert_eq!(cfg.protocol.stop, StopRule::LabeledCount(200));
        assert_eq!(cfg.protocol.split.test_size, 10);
        assert_eq!(cfg.protocol.split.validation_size, 500);
        assert_eq!(cfg.gcn.epochs, 5);
        assert_eq!(cfg.strategies().unwrap().len(), Strategy::ALL.len());
        assert_eq!(cfg.strategy.settings.lof_k, 3);
    }

    #[test]
    fn errors_name_the_field() {
        let e = toml::from_str::<Config>("[dataset]\npath = \"d\"\n[gcn]\nepoch = 3\n").unwrap_err();
        assert!(e.to_string().contains("epoch"), "{e}");
        let e = toml::from_str::<Config>("[dataset]\npath = \"d\"\n[protocol]\nbatch_size = \"x\"\n").unwrap_err();
        assert!(e.to_string().contains("batch_size"), "{e}");
        let e = parse_strategies(&["nope".into()]).unwrap_err();
        assert!(e.to_string().contains("region_margin"), "{e}");
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg: Config = toml::from_str("[dataset]\npath = \"d\"\nname = \"x\"\n").unwrap();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(toml::from_str::<Config>(&text).unwrap(), cfg);
    }
}
