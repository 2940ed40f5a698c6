use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Provenance record written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the canonical JSON of the resolved inputs.
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    /// Written files; `-` stands for standard output.
    pub outputs: Vec<String>,
    pub exit_code: i32,
    /// Command-specific results (fits, verdicts, blowup times).
    pub summary: Value,
}

impl RunManifest {
    pub fn new(command: &str, inputs: &Value, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            config_hash: hash_inputs(inputs),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
            exit_code: 0,
            summary: Value::Null,
        }
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(path, text)
    }
}

/// `serde_json` keeps object keys sorted (no `preserve_order`), so the
/// compact rendering is canonical.
pub fn hash_inputs(inputs: &Value) -> String {
    let digest = Sha256::digest(inputs.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// `--manifest` if given, else `<output>.manifest.json`, else
/// `dampwave-manifest.json` in the working directory.
pub fn manifest_path(explicit: Option<&Path>, output: Option<&Path>) -> PathBuf {
    match (explicit, output) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(o)) => {
            let mut name = o.as_os_str().to_owned();
            name.push(".manifest.json");
            PathBuf::from(name)
        }
        (None, None) => PathBuf::from("dampwave-manifest.json"),
    }
}
