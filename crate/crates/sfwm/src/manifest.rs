//! Run manifests: everything needed to reproduce a command's outputs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::commands::{execute, Command, Common, Outcome};
use crate::config::Config;
use crate::error::{CliError, Result};
use crate::output::json;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConfigRecord {
    /// Path or bundled name the config was loaded from.
    pub source: String,
    /// Full text as parsed; replays use this, not the file.
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub common: Common,
    pub config: ConfigRecord,
    pub resolved: serde_json::Value,
    pub seeds: Vec<u64>,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Manifest(format!("{}: {e}", path.display())))
    }
}

/// Runs `command` on a parsed config and appends the manifest to its files.
pub fn run_with(command: &Command, common: &Common, cfg: &Config) -> Result<Outcome> {
    let mut out = execute(command, cfg, common)?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.clone(),
        common: common.clone(),
        config: ConfigRecord {
            source: cfg.origin.clone(),
            text: cfg.text.clone(),
        },
        resolved: out.resolved.clone(),
        seeds: out.seeds.clone(),
    };
    out.artifacts.push(MANIFEST_FILE, json(&manifest)?);
    Ok(out)
}

pub fn run(command: &Command, common: &Common) -> Result<Outcome> {
    let cfg = Config::load(&common.config)?;
    run_with(command, common, &cfg)
}

/// Re-runs a manifest. Output goes wherever `out_common.out` points.
pub fn replay(manifest: &RunManifest, out_dir: &Path) -> Result<Outcome> {
    let cfg = Config::parse(&manifest.config.text, &manifest.config.source)?;
    let mut common = manifest.common.clone();
    common.out = out_dir.to_path_buf();
    run_with(&manifest.command, &common, &cfg)
}
