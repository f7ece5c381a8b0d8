//! Run manifests and report writers.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::Result;

/// Enough to reproduce a run: the exact configuration, its digest, the
/// master seed and the crate version that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: &'static str,
    pub seed: u64,
    pub threads: usize,
    /// SHA-256 of `config` serialised as compact JSON.
    pub config_sha256: String,
    pub config: ExperimentConfig,
}

impl Manifest {
    pub fn new(command: &str, config: &ExperimentConfig, threads: usize) -> Result<Self> {
        Ok(Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            seed: config.seed,
            threads,
            config_sha256: config_digest(config)?,
            config: config.clone(),
        })
    }
}

pub fn config_digest(config: &ExperimentConfig) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Output directory for one run; created on first use.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(name);
        write_json(&path, value)?;
        Ok(path)
    }

    /// One CSV row per record, with a header taken from the field names.
    pub fn write_csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<PathBuf> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(path)
    }

    pub fn create_file(&self, name: &str) -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.path(name))?))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(f, value)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_tracks_config() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig { seed: 1, ..a.clone() };
        let da = config_digest(&a).unwrap();
        assert_eq!(da.len(), 64);
        assert_eq!(da, config_digest(&a.clone()).unwrap());
        assert_ne!(da, config_digest(&b).unwrap());
    }

    #[test]
    fn writes_manifest_and_csv() {
        #[derive(Serialize)]
        struct Row {
            x: u32,
            v: f64,
        }
        let dir = tempfile::tempdir().unwrap();
        let out = OutputDir::create(dir.path().join("run")).unwrap();
        let m = Manifest::new("verify", &ExperimentConfig::default(), 1).unwrap();
        let p = out.write_json("manifest.json", &m).unwrap();
        let back: serde_json::Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(back["seed"], 20_241_014);
        assert_eq!(back["config"]["L"], 128);
        let p = out
            .write_csv("rows.csv", &[Row { x: 1, v: 0.5 }, Row { x: 2, v: 1.5 }])
            .unwrap();
        assert_eq!(fs::read_to_string(p).unwrap(), "x,v\n1,0.5\n2,1.5\n");
    }
}
