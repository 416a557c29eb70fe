use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// One per run, written last as `manifest.json` in the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name; `gdam replay` runs them again.
    pub argv: Vec<String>,
    pub out_dir: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub timings_secs: BTreeMap<String, f64>,
    pub version: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Collects inputs, outputs and timings while a command runs.
pub struct Run {
    pub out_dir: PathBuf,
    manifest: RunManifest,
    started: Instant,
}

impl Run {
    pub fn new(command: &str, argv: &[String], out_dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(out_dir)
            .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", out_dir.display())))?;
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            manifest: RunManifest {
                command: command.to_string(),
                argv: argv.to_vec(),
                out_dir: out_dir.display().to_string(),
                config: serde_json::Value::Null,
                seeds: Vec::new(),
                inputs: Vec::new(),
                outputs: Vec::new(),
                timings_secs: BTreeMap::new(),
                version: gdam_version().to_string(),
            },
            started: Instant::now(),
        })
    }

    pub fn config<T: Serialize>(&mut self, cfg: &T) -> CliResult<()> {
        self.manifest.config = serde_json::to_value(cfg)?;
        Ok(())
    }

    pub fn seed(&mut self, seed: u64) {
        self.manifest.seeds.push(seed);
    }

    pub fn time(&mut self, name: &str, secs: f64) {
        self.manifest.timings_secs.insert(name.to_string(), secs);
    }

    /// Reads an input file and records its digest.
    pub fn read_input(&mut self, path: &Path) -> CliResult<String> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        self.manifest.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(text)
    }

    /// Writes `name` into the output directory and records its digest.
    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents)?;
        self.manifest.outputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(mut self) -> CliResult<RunManifest> {
        self.manifest
            .timings_secs
            .insert("total".into(), self.started.elapsed().as_secs_f64());
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        std::fs::write(self.out_dir.join("manifest.json"), text)?;
        Ok(self.manifest)
    }
}

pub fn gdam_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

pub fn load_manifest(path: &Path) -> CliResult<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
