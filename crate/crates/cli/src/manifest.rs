//! Run manifests: every emitted report embeds the fully resolved
//! configuration, the tool version, and digests of the input files, so a
//! run can be reproduced bit for bit (single-threaded).

use std::fs::File;
use std::io::Read;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub seed: u64,
    pub threads: usize,
    /// Fully resolved configuration (all defaults materialized).
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64, threads: usize, config: impl Serialize) -> Result<Self> {
        Ok(RunManifest {
            tool: "mapi",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            seed,
            threads,
            config: serde_json::to_value(config)?,
            inputs: Vec::new(),
        })
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let mut file =
            File::open(path).with_context(|| format!("opening input {}", path.display()))?;
        let mut hasher = Sha256::new();
        let mut buf = [0u8; 64 * 1024];
        let mut total = 0u64;
        loop {
            let n = file.read(&mut buf)?;
            if n == 0 {
                break;
            }
            hasher.update(&buf[..n]);
            total += n as u64;
        }
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(digest.len() * 2);
        for b in digest {
            hex.push_str(&format!("{b:02x}"));
        }
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex,
            bytes: total,
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_are_stable() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        std::fs::write(&p, b"hello").unwrap();
        let mut m = RunManifest::new("test", 1, 1, serde_json::json!({"a": 1})).unwrap();
        m.add_input(&p).unwrap();
        assert_eq!(
            m.inputs[0].sha256,
            "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"
        );
        assert_eq!(m.inputs[0].bytes, 5);
    }
}
