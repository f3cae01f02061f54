//! Atomic file writes and run manifests.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Bad flags or flag combinations; exit code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Map a library configuration error to a usage error, anything else to data.
pub fn flag_check(r: scenebench::Result<()>) -> anyhow::Result<()> {
    r.map_err(|e| match e {
        scenebench::Error::Config(m) => usage(m),
        other => other.into(),
    })
}

pub fn read_input(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write via a temporary file in the same directory, then rename into place.
pub fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

#[derive(Serialize)]
struct FileHash {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a, F: Serialize> {
    schema: &'static str,
    version: u32,
    command: &'a str,
    toolkit_version: &'static str,
    seed: Option<u64>,
    flags: &'a F,
    inputs: Vec<FileHash>,
    outputs: Vec<FileHash>,
}

/// Collects hashed inputs and outputs, then writes `<primary output>.manifest.json`.
pub struct Run<'a, F: Serialize> {
    command: &'a str,
    flags: &'a F,
    seed: Option<u64>,
    inputs: Vec<FileHash>,
    outputs: Vec<FileHash>,
    written: Vec<PathBuf>,
}

impl<'a, F: Serialize> Run<'a, F> {
    pub fn new(command: &'a str, flags: &'a F, seed: Option<u64>) -> Self {
        Run {
            command,
            flags,
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            written: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path, contents: &[u8]) {
        self.inputs.push(FileHash {
            path: path.display().to_string(),
            sha256: sha256_hex(contents),
        });
    }

    /// Read a text input and record its hash.
    pub fn read(&mut self, path: &Path) -> anyhow::Result<String> {
        let text = read_input(path)?;
        self.input(path, text.as_bytes());
        Ok(text)
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> anyhow::Result<()> {
        write_atomic(path, contents)?;
        self.outputs.push(FileHash {
            path: path.display().to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        self.written.push(path.to_path_buf());
        Ok(())
    }

    pub fn finish(mut self) -> anyhow::Result<Vec<PathBuf>> {
        let primary = self.written.first().cloned().context("command wrote no output")?;
        let manifest_path = PathBuf::from(format!("{}.manifest.json", primary.display()));
        let manifest = Manifest {
            schema: "scenebench/manifest",
            version: 1,
            command: self.command,
            toolkit_version: env!("CARGO_PKG_VERSION"),
            seed: self.seed,
            flags: self.flags,
            inputs: self.inputs,
            outputs: self.outputs,
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        write_atomic(&manifest_path, &text)?;
        self.written.push(manifest_path);
        Ok(self.written)
    }
}
