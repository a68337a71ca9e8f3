//! Atomic report emission plus the run manifest.
//!
//! Reports are serialized deterministically (fixed field order, shortest
//! round-trip floats, sorted maps); the manifest is the only file carrying
//! timestamps, so reports can be byte-compared across reruns.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub config_hash: String,
    pub created_unix: u64,
    pub created: String,
    pub files: Vec<FileEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

pub struct OutputDir {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    /// Write-to-temp-then-rename so readers never observe partial files.
    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        let tmp = self.dir.join(format!(".tmp-{name}"));
        let path = self.dir.join(name);
        fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path).with_context(|| format!("renaming to {}", path.display()))?;
        self.files.push(FileEntry {
            name: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    pub fn write_csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> anyhow::Result<()> {
        let mut s = header.join(",");
        s.push('\n');
        for row in rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        self.write_bytes(name, s.as_bytes())
    }

    /// Two-column whitespace-separated data, consumable by any plot tool.
    pub fn write_plot(&mut self, name: &str, points: &[(f64, f64)]) -> anyhow::Result<()> {
        let mut s = String::new();
        for (x, y) in points {
            s.push_str(&format!("{x} {y}\n"));
        }
        self.write_bytes(name, s.as_bytes())
    }

    /// Store the exact config bytes and the manifest over everything
    /// written so far.
    pub fn finalize(mut self, config_bytes: &[u8]) -> anyhow::Result<RunManifest> {
        self.write_bytes("config.json", config_bytes)?;
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest = RunManifest {
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: sha256_hex(config_bytes),
            created_unix: now,
            created: chrono::DateTime::from_timestamp(now as i64, 0)
                .map(|t| t.to_rfc3339())
                .unwrap_or_default(),
            files: self.files.clone(),
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        let tmp = self.dir.join(".tmp-manifest.json");
        fs::write(&tmp, &bytes)?;
        fs::rename(tmp, self.dir.join("manifest.json"))?;
        Ok(manifest)
    }
}

/// `name.ext` -> `name.refined.ext` for the doubled-resolution re-emission.
pub fn refined_name(name: &str) -> String {
    match name.rsplit_once('.') {
        Some((stem, ext)) => format!("{stem}.refined.{ext}"),
        None => format!("{name}.refined"),
    }
}

/// Shortest-round-trip float formatting shared by all CSV emitters.
pub fn fmt(v: f64) -> String {
    format!("{v}")
}
