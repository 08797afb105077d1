use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// Envelope written by every subcommand. Only `wall_time_s` varies between
/// identical runs.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: Vec<String>,
    /// sha256 of each input file, keyed by path as given.
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    pub results: serde_json::Value,
    pub wall_time_s: f64,
    pub version: &'static str,
}

/// Reads input files and remembers their digests.
#[derive(Debug)]
pub struct Session {
    started: Instant,
    command: Vec<String>,
    seed: u64,
    inputs: BTreeMap<String, String>,
}

impl Session {
    pub fn new(command: Vec<String>, seed: u64) -> Self {
        Self {
            started: Instant::now(),
            command,
            seed,
            inputs: BTreeMap::new(),
        }
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.inputs
            .insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn finish(self, results: impl Serialize) -> Result<RunReport> {
        Ok(RunReport {
            schema: SCHEMA_VERSION,
            command: self.command,
            inputs: self.inputs,
            seed: self.seed,
            results: serde_json::to_value(results)?,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION"),
        })
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// `name` in the directory of `out`.
pub fn sibling(out: &Path, name: &str) -> PathBuf {
    out.parent().map_or_else(|| PathBuf::from(name), |p| p.join(name))
}
