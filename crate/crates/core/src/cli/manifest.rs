use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Provenance record embedded in every report.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// The arguments after the program name, verbatim.
    pub flags: Vec<String>,
    /// SHA-256 of every input file, keyed by the path as given.
    pub inputs: BTreeMap<String, String>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Present only with `--timing`, since it breaks byte-identical reruns.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
    pub exit_status: i32,
}

impl RunManifest {
    pub fn new(command: &str, flags: Vec<String>) -> Self {
        RunManifest {
            command: command.to_string(),
            flags,
            version: env!("CARGO_PKG_VERSION").to_string(),
            ..Default::default()
        }
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        let digest = Sha256::digest(bytes);
        self.inputs
            .insert(path.display().to_string(), hex::encode(digest));
    }
}

/// A command result with its manifest alongside the result fields.
#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    #[serde(flatten)]
    pub body: &'a T,
    pub manifest: &'a RunManifest,
}
