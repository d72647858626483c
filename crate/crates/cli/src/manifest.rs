use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Environment variable naming the output directory.
pub const OUT_DIR_ENV: &str = "SESIM_OUT_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: String,
    /// Hex SHA-256 of the file contents.
    pub sha256: String,
}

/// One per invocation, written next to the outputs as `<command>.manifest.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    /// Parsed arguments with defaults filled in.
    pub config: serde_json::Value,
    pub inputs: Vec<InputRecord>,
    pub seed: Option<u64>,
    pub tool_version: String,
    /// RFC 3339.
    pub timestamp: String,
    /// Output file names, relative to the output directory.
    pub outputs: Vec<String>,
    pub exit_code: i32,
    pub error: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Collects inputs and outputs while a command runs.
#[derive(Debug)]
pub struct RunContext {
    dir: PathBuf,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<String>,
}

impl RunContext {
    pub fn new(dir: PathBuf) -> Self {
        RunContext {
            dir,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(InputRecord {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    /// Reads a file and records its hash.
    pub fn read_input(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.record_input(path, &bytes);
        Ok(bytes)
    }

    pub fn write_output(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_output(name, text.as_bytes())
    }
}

impl RunManifest {
    pub fn file_name(command: &str) -> String {
        format!("{command}.manifest.json")
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(Self::file_name(&self.command));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
