use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Record written next to every output: what ran, on which inputs, producing which files.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub subcommand: &'a str,
    pub tool_version: &'a str,
    pub seed: u64,
    pub config: &'a RunConfig,
    /// SHA-256 of each input, keyed by file name.
    pub inputs: &'a BTreeMap<String, String>,
    /// Paths relative to the output directory.
    pub outputs: &'a [String],
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Output directory plus bookkeeping for the manifest.
pub struct RunOutputs {
    dir: PathBuf,
    written: Vec<String>,
    inputs: BTreeMap<String, String>,
}

impl RunOutputs {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(RunOutputs {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            inputs: BTreeMap::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn record_input(&mut self, name: impl Into<String>, bytes: &[u8]) {
        self.inputs.insert(name.into(), sha256_hex(bytes));
    }

    /// Hashes a file that was read as an input. Missing files are skipped.
    pub fn record_input_file(&mut self, path: &Path) -> anyhow::Result<()> {
        if !path.exists() {
            return Ok(());
        }
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        self.record_input(name, &bytes);
        Ok(())
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_owned());
        Ok(())
    }

    pub fn mark_written(&mut self, name: &str) {
        self.written.push(name.to_owned());
    }

    pub fn finish(mut self, subcommand: &str, config: &RunConfig) -> anyhow::Result<()> {
        let manifest_name = format!("manifest-{subcommand}.json");
        let mut outputs = self.written.clone();
        outputs.sort();
        let manifest = RunManifest {
            subcommand,
            tool_version: env!("CARGO_PKG_VERSION"),
            seed: config.seed,
            config,
            inputs: &self.inputs,
            outputs: &outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        self.write(&manifest_name, text)
    }
}
