//! Reproducibility header embedded in every CLI artifact.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub args: Vec<String>,
    /// `(path, sha256)` of every input file, in the order read.
    pub inputs: Vec<(PathBuf, String)>,
}

impl Provenance {
    pub fn new(args: &[String]) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            args: args.to_vec(),
            inputs: Vec::new(),
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        self.inputs.push((path.to_path_buf(), hex::encode(Sha256::digest(&bytes))));
        Ok(())
    }

    /// Comment-ready lines (without the comment marker).
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("{} {}", self.tool, self.version),
            format!("args: {}", self.args.join(" ")),
        ];
        out.extend(
            self.inputs
                .iter()
                .map(|(p, h)| format!("input: {} sha256={h}", p.display())),
        );
        out
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("plain data serializes")
    }
}
