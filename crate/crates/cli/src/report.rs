//! Versioned JSON envelope shared by every command.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "obliq/1";

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, f64>,
    pub outputs: serde_json::Value,
    pub timings: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct ErrorReport<'a> {
    pub schema: &'static str,
    pub command: &'a str,
    pub error: ErrorBody,
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

pub fn digest_file(path: &Path) -> std::io::Result<String> {
    Ok(digest_bytes(&std::fs::read(path)?))
}

/// Collects per-phase wall times; stays empty unless enabled so that reports
/// remain byte-stable by default.
pub struct Timer {
    enabled: bool,
    phases: BTreeMap<String, f64>,
}

impl Timer {
    pub fn new(enabled: bool) -> Self {
        Self { enabled, phases: BTreeMap::new() }
    }

    pub fn time<T>(&mut self, phase: impl Into<String>, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            let ms = start.elapsed().as_secs_f64() * 1e3;
            *self.phases.entry(phase.into()).or_insert(0.0) += ms;
        }
        out
    }

    pub fn into_phases(self) -> BTreeMap<String, f64> {
        self.phases
    }
}
