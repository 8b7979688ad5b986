use std::fs;
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scene::{reference_json, Scenario};

pub const MANIFEST_SCHEMA: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Scenario text together with where it came from.
#[derive(Debug, Clone)]
pub struct ScenarioSource {
    /// File path, or a `builtin:` label for the shipped scenarios.
    pub label: String,
    pub text: String,
}

impl ScenarioSource {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(ScenarioSource {
            label: path.display().to_string(),
            text,
        })
    }

    /// The shipped reference room with `n_elements` antennas (16 or 100).
    pub fn builtin(n_elements: usize) -> Result<Self> {
        let text = reference_json(n_elements).ok_or_else(|| {
            Error::invalid(
                "scenario",
                format!("no built-in scenario with {n_elements} elements"),
            )
        })?;
        Ok(ScenarioSource {
            label: format!("builtin:reference_n{n_elements}"),
            text: text.to_string(),
        })
    }

    pub fn parse(&self) -> Result<Scenario> {
        Scenario::from_json_str(&self.text)
    }

    pub fn sha256(&self) -> String {
        sha256_hex(self.text.as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRef {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub library_version: String,
    pub mode: String,
    pub scenario: ScenarioRef,
    pub seed: u64,
    /// Mode-specific settings that influence the outputs.
    pub parameters: serde_json::Map<String, serde_json::Value>,
    pub artifacts: Vec<ArtifactEntry>,
}

impl RunManifest {
    pub fn read(path: impl AsRef<Path>) -> Result<RunManifest> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Writes files below one directory and remembers their digests.
#[derive(Debug)]
pub struct ArtifactSink {
    root: PathBuf,
    entries: Vec<ArtifactEntry>,
}

impl ArtifactSink {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(ArtifactSink {
            root,
            entries: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> &[ArtifactEntry] {
        &self.entries
    }

    /// Write `bytes` at `rel`, which must stay inside the root.
    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let rel_path = Path::new(rel);
        if rel_path
            .components()
            .any(|c| !matches!(c, Component::Normal(_)))
        {
            return Err(Error::invalid(
                "artifact path",
                format!("`{rel}` escapes the output directory"),
            ));
        }
        let full = self.root.join(rel_path);
        if let Some(parent) = full.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&full, bytes).map_err(|e| Error::io(&full, e))?;
        self.entries.push(ArtifactEntry {
            path: rel.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    /// Render into a buffer with `f`, then write it.
    pub fn write_with(
        &mut self,
        rel: &str,
        f: impl FnOnce(&mut Vec<u8>) -> Result<()>,
    ) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(rel, &buf)
    }

    /// Write `manifest.json` and `timing.json`; returns the manifest.
    pub fn finish(
        self,
        mode: &str,
        source: &ScenarioSource,
        seed: u64,
        parameters: serde_json::Map<String, serde_json::Value>,
        timing: serde_json::Value,
    ) -> Result<RunManifest> {
        let manifest = RunManifest {
            schema_version: MANIFEST_SCHEMA,
            library_version: crate::VERSION.to_string(),
            mode: mode.to_string(),
            scenario: ScenarioRef {
                path: source.label.clone(),
                sha256: source.sha256(),
            },
            seed,
            parameters,
            artifacts: self.entries,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.root.join("manifest.json");
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        let mut timing_text = serde_json::to_string_pretty(&timing)?;
        timing_text.push('\n');
        let path = self.root.join("timing.json");
        fs::write(&path, timing_text).map_err(|e| Error::io(&path, e))?;
        Ok(manifest)
    }
}
