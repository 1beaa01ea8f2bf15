//! Run manifests: one JSON per artifact, echoing the resolved configuration
//! so the artifact can be reproduced from the manifest alone.
//!
//! Worker count is deliberately not recorded: it cannot affect output bytes.

use std::path::{Path, PathBuf};

use serde::Serialize;

use nuft::Result;

#[derive(Serialize)]
pub struct Manifest<C: Serialize> {
    pub command: &'static str,
    pub seed: u64,
    pub config: C,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

pub fn default_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

pub fn write<C: Serialize>(path: &Path, manifest: &Manifest<C>) -> Result<()> {
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    std::fs::write(path, json)?;
    Ok(())
}
