//! Atomic file output and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Writes `bytes` to a temporary file beside `path`, then renames it over.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Everything needed to rerun a command.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub seeds: Vec<u64>,
    pub artifacts: Vec<Artifact>,
    pub inputs: Vec<Artifact>,
    pub tool_version: &'static str,
    pub wall_time_s: f64,
}

/// Collects the artifacts of one run and writes them plus a manifest.
pub struct Run {
    command: String,
    started: Instant,
    seeds: Vec<u64>,
    inputs: Vec<Artifact>,
    artifacts: Vec<Artifact>,
    manifest_path: Option<PathBuf>,
}

impl Run {
    pub fn new(command: &str) -> Self {
        Run {
            command: command.into(),
            started: Instant::now(),
            seeds: Vec::new(),
            inputs: Vec::new(),
            artifacts: Vec::new(),
            manifest_path: None,
        }
    }

    pub fn seed(&mut self, s: u64) {
        self.seeds.push(s);
    }

    pub fn read_input(&mut self, path: &Path) -> Result<String> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(Artifact { path: path.display().to_string(), sha256: sha256_hex(text.as_bytes()), bytes: text.len() });
        Ok(text)
    }

    /// Writes an artifact; the first one also names the manifest file.
    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        write_atomic(path, bytes)?;
        if self.manifest_path.is_none() {
            let mut name = path.as_os_str().to_owned();
            name.push(".manifest.json");
            self.manifest_path = Some(PathBuf::from(name));
        }
        self.artifacts.push(Artifact { path: path.display().to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        let Some(path) = self.manifest_path.clone() else { return Ok(()) };
        let manifest = RunManifest {
            command: self.command,
            arguments: std::env::args().skip(1).collect(),
            seeds: self.seeds,
            artifacts: self.artifacts,
            inputs: self.inputs,
            tool_version: env!("CARGO_PKG_VERSION"),
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        write_atomic(&path, text.as_bytes())
    }
}
