//! CSV emission, output placement and run manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::process;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::cli::Command;

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// A CSV document with a header row.
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Where a run puts its files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Layout {
    /// One output file; the manifest sits next to it as `<stem>.manifest.json`.
    File(PathBuf),
    /// A directory holding every output and `manifest.json`.
    Dir(PathBuf),
}

impl Layout {
    pub fn dir(&self) -> PathBuf {
        match self {
            Layout::File(p) => p.parent().map(Path::to_path_buf).unwrap_or_default(),
            Layout::Dir(d) => d.clone(),
        }
    }

    pub fn manifest_path(&self) -> PathBuf {
        match self {
            Layout::File(p) => {
                let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                self.dir().join(format!("{stem}.manifest.json"))
            }
            Layout::Dir(d) => d.join("manifest.json"),
        }
    }
}

/// A produced file, named relative to the layout directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Command,
    pub seeds: Vec<u64>,
    pub threads: usize,
    pub git_describe: String,
    /// Output files relative to the manifest's directory.
    pub outputs: Vec<String>,
    pub wall_clock_secs: f64,
}

pub fn git_describe() -> String {
    process::Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}

/// Writes the outputs and the manifest, refusing to replace existing files
/// unless `force` is set.
pub fn write_run(layout: &Layout, files: &[OutFile], manifest: &RunManifest, force: bool) -> Result<()> {
    let dir = layout.dir();
    let targets: Vec<PathBuf> = files
        .iter()
        .map(|f| dir.join(&f.name))
        .chain(std::iter::once(layout.manifest_path()))
        .collect();
    if !force {
        if let Some(t) = targets.iter().find(|t| t.exists()) {
            bail!("{} already exists (pass --force to overwrite)", t.display());
        }
    }
    if !dir.as_os_str().is_empty() {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    for f in files {
        let p = dir.join(&f.name);
        fs::write(&p, &f.contents).with_context(|| format!("writing {}", p.display()))?;
    }
    let json = serde_json::to_string_pretty(manifest)?;
    fs::write(layout.manifest_path(), json + "\n")?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
