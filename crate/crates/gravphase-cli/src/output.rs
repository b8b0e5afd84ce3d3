//! Deterministic result records: sorted-key JSON with a content hash of the
//! resolved configuration, so identical runs produce identical bytes.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::Config;

/// Envelope written by every command.
#[derive(Serialize)]
pub struct ResultRecord<T: Serialize> {
    /// Producing tool.
    pub artifact: &'static str,
    /// Tool version.
    pub version: &'static str,
    /// Constant set the numbers are based on.
    pub constants: &'static str,
    /// Subcommand that produced the record.
    pub command: String,
    /// Random seed of the run (drives only the Monte Carlo commands).
    pub seed: u64,
    /// FNV-1a 64 hash of the resolved scenario, as fixed-width hex.
    pub scenario_hash: String,
    /// The fully resolved configuration the run used.
    pub scenario: Config,
    /// Command-specific payload.
    pub result: T,
}

/// FNV-1a 64-bit hash of a byte string.
fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Canonical JSON text: serde_json maps sort keys, so equal values give
/// equal bytes.
fn canonical_json<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let value = serde_json::to_value(value)?;
    serde_json::to_string_pretty(&value)
}

impl<T: Serialize> ResultRecord<T> {
    /// Wraps a command result with the run's identifying metadata.
    pub fn new(command: &str, seed: u64, config: &Config, result: T) -> Self {
        let scenario_json =
            canonical_json(config).expect("configuration serializes infallibly");
        ResultRecord {
            artifact: "gravphase",
            version: env!("CARGO_PKG_VERSION"),
            constants: "CODATA-2018",
            command: command.to_string(),
            seed,
            scenario_hash: format!("{:016x}", fnv1a_64(scenario_json.as_bytes())),
            scenario: config.clone(),
            result,
        }
    }

    /// The record as sorted-key JSON, newline-terminated.
    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        Ok(canonical_json(self)? + "\n")
    }
}

/// Writes `text` to `<dir>/<name>`, creating the directory if needed.
pub fn write_text(dir: &Path, name: &str, text: &str) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)
}

/// Writes CSV rows (with the given header) to `<dir>/<name>`.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), Box<dyn std::error::Error>> {
    fs::create_dir_all(dir)?;
    let mut writer = csv::Writer::from_path(dir.join(name))?;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}
