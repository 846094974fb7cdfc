//! Output directory bookkeeping and the replay manifest.
//!
//! Every command writes its files through an [`OutDir`] and finishes with
//! `manifest.json`: command, seed, effective config and its hash, and the
//! SHA-256 of every input and output. Nothing time-dependent goes in, so
//! identical runs produce identical manifests.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::canonical_sha256;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config_sha256: String,
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

pub fn digest_file(path: &Path, name: String) -> Result<FileDigest> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(FileDigest {
        path: name,
        bytes: bytes.len() as u64,
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Write one file through `f`; `name` may contain `/` subdirectories.
    pub fn write<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        f(&mut w)?;
        w.flush()?;
        if !self.written.iter().any(|n| n == name) {
            self.written.push(name.to_string());
        }
        log::info!("wrote {}", path.display());
        Ok(())
    }

    /// Pretty JSON with a trailing newline.
    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    /// Hash everything written so far and write the manifest.
    pub fn finish(mut self, command: &str, seed: u64, config: serde_json::Value, inputs: &[(&str, &Path)]) -> Result<Manifest> {
        let inputs = inputs
            .iter()
            .map(|(name, path)| digest_file(path, (*name).to_string()))
            .collect::<Result<Vec<_>>>()?;
        let mut names = std::mem::take(&mut self.written);
        names.sort();
        let outputs = names
            .into_iter()
            .map(|n| digest_file(&self.path(&n), n))
            .collect::<Result<Vec<_>>>()?;
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            config_sha256: canonical_sha256(&config),
            config,
            inputs,
            outputs,
        };
        self.write_json(MANIFEST_FILE, &manifest)?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_outputs_sorted_with_hashes() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutDir::create(dir.path()).unwrap();
        out.write("b.txt", |w| Ok(w.write_all(b"abc")?)).unwrap();
        out.write_json("sub/a.json", &[1, 2]).unwrap();
        let m = out.finish("test", 9, serde_json::json!({"x": 1}), &[]).unwrap();
        let names: Vec<_> = m.outputs.iter().map(|o| o.path.as_str()).collect();
        assert_eq!(names, ["b.txt", "sub/a.json"]);
        assert_eq!(
            m.outputs[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        let text = std::fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
        assert!(text.contains("\"seed\": 9"));
    }
}
