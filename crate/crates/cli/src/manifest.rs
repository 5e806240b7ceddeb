use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use bridgeness::Graph;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct GraphInput {
    #[serde(flatten)]
    pub file: InputFile,
    pub nodes: usize,
    pub edges: usize,
    /// Hash of the parsed adjacency, independent of file formatting.
    pub adjacency_sha256: String,
}

/// Everything needed to rerun a command: configuration, seeds and input hashes.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphInput>,
    pub inputs: Vec<InputFile>,
    pub outputs: Vec<String>,
    pub created_unix: u64,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> Result<InputFile, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(InputFile { path: path.to_path_buf(), sha256: sha256_hex(&bytes) })
}

impl Manifest {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: cfg.clone(),
            seeds: cfg.seeds.clone(),
            graph: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }

    pub fn with_graph(mut self, path: &Path, g: &Graph) -> Result<Self, CliError> {
        self.graph = Some(GraphInput {
            file: hash_file(path)?,
            nodes: g.num_nodes(),
            edges: g.num_edges(),
            adjacency_sha256: sha256_hex(&g.adjacency_bytes()),
        });
        Ok(self)
    }

    pub fn input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.push(hash_file(path)?);
        Ok(())
    }

    /// Write `manifest.json` and a replayable `config.txt` into `dir`.
    pub fn write(mut self, dir: &Path) -> Result<(), CliError> {
        self.outputs.push("manifest.json".into());
        self.outputs.push("config.txt".into());
        let json = serde_json::to_string_pretty(&self).map_err(|e| CliError::Runtime(e.to_string()))?;
        crate::commands::write_text(&dir.join("manifest.json"), &json)?;
        crate::commands::write_text(&dir.join("config.txt"), &self.config.to_kv())
    }
}
