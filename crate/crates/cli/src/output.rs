//! Output files with a provenance header, and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// An output directory that stamps every file it writes.
#[derive(Debug)]
pub struct Outputs {
    root: PathBuf,
    header: String,
    config_hash: String,
    seed: u64,
    written: BTreeMap<String, ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config_hash: &'a str,
    seed: u64,
    outputs: Vec<&'a ManifestEntry>,
}

impl Outputs {
    pub fn new(root: &Path, config: &RunConfig) -> Result<Self> {
        std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        let config_hash = config.hash();
        Ok(Outputs {
            root: root.to_path_buf(),
            header: format!("# rstdiag {VERSION} config={config_hash} seed={}\n", config.seed),
            config_hash,
            seed: config.seed,
            written: BTreeMap::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// The `#` line every output starts with.
    pub fn header(&self) -> &str {
        &self.header
    }

    /// Write `body` under `rel` (slash-separated) after the header line.
    pub fn write(&mut self, rel: &str, body: &str) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        let content = format!("{}{body}", self.header);
        std::fs::write(&path, &content).with_context(|| format!("writing {}", path.display()))?;
        self.written.insert(
            rel.to_string(),
            ManifestEntry {
                path: rel.to_string(),
                sha256: hex::encode(Sha256::digest(content.as_bytes())),
                bytes: content.len(),
            },
        );
        Ok(path)
    }

    /// Write CSV rows produced by `fill`.
    pub fn write_csv(&mut self, rel: &str, fill: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>) -> Result<PathBuf> {
        let mut w = csv::Writer::from_writer(Vec::new());
        fill(&mut w)?;
        let bytes = w.into_inner().context("flushing csv")?;
        self.write(rel, &String::from_utf8(bytes).context("csv is not UTF-8")?)
    }

    pub fn entries(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.written.values()
    }

    /// `manifest.json`: tool, version, config hash, seed and every written
    /// file with its SHA-256, sorted by path.
    pub fn write_manifest(&self) -> Result<PathBuf> {
        let manifest = Manifest {
            tool: "rstdiag",
            version: VERSION,
            config_hash: &self.config_hash,
            seed: self.seed,
            outputs: self.written.values().collect(),
        };
        let path = self.root.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Fixed-precision float for tables, so reruns print identical text.
pub fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "NA".to_string()
    } else {
        format!("{x:.6}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig::default();
        let mut out = Outputs::new(dir.path(), &config).unwrap();
        let path = out
            .write_csv("a/b.csv", |w| {
                w.write_record(["x", "y"])?;
                Ok(())
            })
            .unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.starts_with("# rstdiag "));
        assert!(text.contains(&format!("config={}", config.hash())));
        assert!(text.ends_with("x,y\n"));
        let manifest = std::fs::read_to_string(out.write_manifest().unwrap()).unwrap();
        let json: serde_json::Value = serde_json::from_str(&manifest).unwrap();
        assert_eq!(json["outputs"][0]["path"], "a/b.csv");
        assert_eq!(json["seed"], 0);
    }
}
