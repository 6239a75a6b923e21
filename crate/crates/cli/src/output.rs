//! CSV and manifest emission with deterministic bytes.
//!
//! Every CSV starts with a `# config <digest>` comment naming the resolved
//! configuration it came from, then a header row. The manifest echoes the
//! config, per-trial seeds, tool version and result digests; re-running the
//! same manifest reproduces the CSV bytes exactly (wall clock lives only in
//! the manifest and is excluded from digests).

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub config_digest: String,
    pub master_seed: u64,
    pub trial_seeds: Vec<u64>,
    pub wall_clock_ms: u128,
    pub files: Vec<FileDigest>,
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex_string(&h.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Digest of the canonical (sorted-key JSON) config echo.
pub fn config_digest(config: &serde_json::Value) -> String {
    sha256_hex(serde_json::to_string(config).unwrap_or_default().as_bytes())
}

pub struct OutputDir {
    dir: PathBuf,
    command: String,
    config: serde_json::Value,
    digest: String,
    master_seed: u64,
    trial_seeds: Vec<u64>,
    files: Vec<FileDigest>,
    started: std::time::Instant,
}

impl OutputDir {
    pub fn create(
        dir: &Path,
        command: &str,
        config: serde_json::Value,
        master_seed: u64,
        trial_seeds: Vec<u64>,
    ) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating output dir {}", dir.display()))?;
        let digest = config_digest(&config);
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            config,
            digest,
            master_seed,
            trial_seeds,
            files: Vec::new(),
            started: std::time::Instant::now(),
        })
    }

    /// Writes a CSV: config comment, header, then rows.
    pub fn write_csv(&mut self, name: &str, header: &str, rows: &[String]) -> Result<()> {
        let mut text = String::new();
        text.push_str(&format!("# config {}\n", self.digest));
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        let path = self.dir.join(name);
        std::fs::write(&path, &text)
            .with_context(|| format!("writing {}", path.display()))?;
        self.files.push(FileDigest {
            name: name.to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text)
            .with_context(|| format!("writing {}", path.display()))?;
        self.files.push(FileDigest {
            name: name.to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(())
    }

    /// Writes `manifest.json` and finishes the run.
    pub fn finish(self) -> Result<()> {
        let manifest = Manifest {
            tool: "hypsurf".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command,
            config: self.config,
            config_digest: self.digest,
            master_seed: self.master_seed,
            trial_seeds: self.trial_seeds,
            wall_clock_ms: self.started.elapsed().as_millis(),
            files: self.files,
        };
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest)?;
        std::fs::write(&path, text)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.12e}")
}
