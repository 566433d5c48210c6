use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Record of one run. Digests are keyed by file name so that runs written to
/// different directories compare equal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub elapsed_ms: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_key(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Collects input and output digests while a command runs.
pub struct Recorder {
    command: String,
    parameters: serde_json::Value,
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
    started: Instant,
}

impl Recorder {
    pub fn new(command: &str, parameters: serde_json::Value, seed: Option<u64>) -> Self {
        Recorder {
            command: command.to_string(),
            parameters,
            seed,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.insert(file_key(path), sha256_hex(text.as_bytes()));
        Ok(text)
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<(), CliError> {
        fs::write(path, contents)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.insert(file_key(path), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, path: &Path, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.write(path, &text)
    }

    /// Writes the manifest next to `out` as `<out>.manifest.json`.
    pub fn finish(self, out: &Path) -> Result<RunManifest, CliError> {
        let manifest = RunManifest {
            command: self.command,
            parameters: self.parameters,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: self.inputs,
            outputs: self.outputs,
            elapsed_ms: self.started.elapsed().as_secs_f64() * 1e3,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("serializable");
        text.push('\n');
        fs::write(sidecar(out, "manifest.json"), text)
            .map_err(|e| CliError::Usage(format!("cannot write manifest: {e}")))?;
        Ok(manifest)
    }
}

/// `out.hg` becomes `out.<suffix>`.
pub fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}
