use std::path::{Path, PathBuf};

use clap::Args;
use gdam::SolverConfig;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Solver flags shared by every command that runs a solver.
#[derive(Debug, Clone, Default, Args)]
pub struct SolverFlags {
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub beta_min: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// JSON file with configuration fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl SolverFlags {
    pub fn apply(&self, cfg: &mut SolverConfig) {
        if let Some(v) = self.zeta {
            cfg.zeta = v;
        }
        if let Some(v) = self.beta {
            cfg.beta = v;
        }
        if let Some(v) = self.beta_min {
            cfg.beta_min = v;
        }
        if let Some(v) = self.tau {
            cfg.tau = v;
        }
        if let Some(v) = self.momentum {
            cfg.momentum = v;
        }
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
    }

    /// `base`, then the config file, then the flags.
    pub fn resolve(&self, base: SolverConfig) -> CliResult<SolverConfig> {
        let mut cfg = overlay_file(base, self.config.as_deref())?;
        self.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Replaces the fields of `base` named in the JSON object at `path`,
/// recursing into nested objects.
pub fn overlay_file<T: Serialize + DeserializeOwned>(base: T, path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else { return Ok(base) };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let patch: Value = serde_json::from_str(&text)?;
    if !patch.is_object() {
        return Err(CliError::Usage(format!("{}: expected a JSON object", path.display())));
    }
    let mut value = serde_json::to_value(base)?;
    merge(&mut value, patch);
    serde_json::from_value(value).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn merge(into: &mut Value, patch: Value) {
    match (into, patch) {
        (Value::Object(dst), Value::Object(src)) => {
            for (k, v) in src {
                match dst.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        dst.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Comma-separated coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords(pub Vec<f64>);

pub fn parse_point(s: &str) -> Result<Coords, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<_, _>>()
        .map(Coords)
}
