use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Seconds since the epoch, pinned by `SOURCE_DATE_EPOCH` when set.
pub fn timestamp() -> (u64, &'static str) {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.trim().parse().ok()) {
        return (t, "SOURCE_DATE_EPOCH");
    }
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    (now, "clock")
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigRef {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputEntry {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub bubblelab: &'static str,
    pub bubblelab_core: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub command: &'static str,
    pub config: ConfigRef,
    pub tol_override: Option<f64>,
    pub versions: Versions,
    pub started: u64,
    pub finished: u64,
    pub clock: &'static str,
    /// `"ok"` or `"checks_failed"`.
    pub status: &'static str,
    pub outputs: Vec<OutputEntry>,
}

impl RunRecord {
    pub fn entry(file: &str, bytes: &[u8]) -> OutputEntry {
        OutputEntry { file: file.to_string(), bytes: bytes.len(), sha256: sha256_hex(bytes) }
    }

    pub fn versions() -> Versions {
        Versions { bubblelab: env!("CARGO_PKG_VERSION"), bubblelab_core: bubblelab_core::VERSION }
    }
}
