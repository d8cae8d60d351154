use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use graph_al::data::{CONTENT_FILE, EDGES_FILE, LABELS_FILE};
use graph_al::experiment::RunSeeds;

use crate::config::Config;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Running,
    Completed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRun {
    pub run_id: usize,
    pub strategy: String,
    pub seeds: RunSeeds,
}

/// Everything needed to repeat a command: pass the manifest back as
/// `--config` to rerun with the same resolved settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub started: String,
    pub finished: Option<String>,
    pub status: Status,
    pub config: Config,
    pub runs: Vec<ManifestRun>,
    /// SHA-256 of each dataset file, keyed by file name.
    pub dataset_sha256: BTreeMap<String, String>,
    pub outputs: Vec<PathBuf>,
    pub failed_runs: usize,
}

impl RunManifest {
    pub fn new(command: &str, config: Config, runs: Vec<ManifestRun>) -> std::io::Result<Self> {
        let dataset_sha256 = dataset_checksums(&config.dataset.path)?;
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            command: command.to_owned(),
            started: now(),
            finished: None,
            status: Status::Running,
            config,
            runs,
            dataset_sha256,
            outputs: Vec::new(),
            failed_runs: 0,
        })
    }

    pub fn finish(&mut self, status: Status) {
        self.status = status;
        self.finished = Some(now());
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        fs::write(dir.join(MANIFEST_FILE), text + "\n")
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let mut file = fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let k = file.read(&mut buf)?;
        if k == 0 {
            break;
        }
        hasher.update(&buf[..k]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

fn dataset_checksums(dir: &Path) -> std::io::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for name in [EDGES_FILE, LABELS_FILE, CONTENT_FILE] {
        let path = dir.join(name);
        if path.exists() {
            out.insert(name.to_owned(), sha256_file(&path)?);
        }
    }
    Ok(out)
}
