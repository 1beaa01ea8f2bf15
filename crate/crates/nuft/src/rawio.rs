//! Little-endian raw f64 payloads with JSON sidecar headers.
//!
//! A grid artifact is two files: `<path>` holds the raw values, `<path>.json`
//! the header. Loaders check the payload length against the header.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub(crate) fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".json");
    path.with_file_name(name)
}

pub(crate) fn write_payload<H: Serialize>(path: &Path, header: &H, values: &[f64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes)?;
    let json = serde_json::to_string_pretty(header).expect("header serializes");
    fs::write(sidecar_path(path), json)?;
    Ok(())
}

pub(crate) fn read_payload<H: DeserializeOwned>(path: &Path, expect_len: impl FnOnce(&H) -> usize) -> Result<(H, Vec<f64>)> {
    let sidecar = sidecar_path(path);
    let header: H = serde_json::from_str(&fs::read_to_string(&sidecar)?).map_err(|e| {
        Error::BadFile {
            path: sidecar.display().to_string(),
            message: e.to_string(),
        }
    })?;
    let bytes = fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::BadFile {
            path: path.display().to_string(),
            message: format!("payload of {} bytes is not a multiple of 8", bytes.len()),
        });
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let want = expect_len(&header);
    if values.len() != want {
        return Err(Error::BadFile {
            path: path.display().to_string(),
            message: format!("payload holds {} values, header implies {want}", values.len()),
        });
    }
    Ok((header, values))
}
