//! Testbed generation and the manifest that lists it.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use bilevel_core::instances::{format_instance, gen_testbed, InstanceFile};
use bilevel_core::BilevelInstance;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const INSTANCE_DIR: &str = "instances";
pub const INSTANCE_EXT: &str = "inst";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scale {
    /// 50 parameter sets per combination, 600 files.
    Paper,
    /// 5 parameter sets per combination, 60 files.
    Desk,
}

impl Scale {
    pub fn per_combo(self) -> usize {
        match self {
            Scale::Paper => 50,
            Scale::Desk => 5,
        }
    }
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "paper" => Ok(Scale::Paper),
            "desk" => Ok(Scale::Desk),
            other => Err(format!("unknown scale `{other}`")),
        }
    }
}

/// One manifest line. `file` is relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub id: String,
    pub file: String,
    pub family: String,
    pub q_kind: String,
    pub n_x: usize,
    pub n_y: usize,
    pub sense: String,
    pub seed: String,
    pub sha256: String,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl ManifestRow {
    pub fn describe(file: &InstanceFile, rel_path: &str, text: &str) -> Self {
        let (family, n_x, n_y) = match &file.instance {
            BilevelInstance::Quad(q) => ("quad", q.n_x(), q.n_y()),
            BilevelInstance::Lin(l) => ("lin", l.n_x(), l.n_y()),
        };
        Self {
            id: file.id.clone(),
            file: rel_path.to_string(),
            family: family.into(),
            q_kind: file.q_kind.map_or_else(|| "custom".into(), |k| k.to_string()),
            n_x,
            n_y,
            sense: file.instance.sense().to_string(),
            seed: file.seed.map_or_else(|| "none".into(), |s| s.to_string()),
            sha256: digest(text.as_bytes()),
        }
    }
}

/// Writes `file` under `dir/instances/` and returns its manifest row.
pub fn write_instance_file(dir: &Path, file: &InstanceFile) -> Result<ManifestRow> {
    let rel = format!("{INSTANCE_DIR}/{}.{INSTANCE_EXT}", file.id);
    let path = dir.join(&rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let text = format_instance(file);
    fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
    Ok(ManifestRow::describe(file, &rel, &text))
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<ManifestRow>, _>>()
        .with_context(|| format!("parsing {}", path.display()))?;
    let mut ids: Vec<&str> = rows.iter().map(|r| r.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        bail!("duplicate instance id `{}` in {}", w[0], path.display());
    }
    Ok(rows)
}

/// Resolves a manifest row's file against the manifest location.
pub fn instance_path(manifest: &Path, row: &ManifestRow) -> PathBuf {
    manifest.parent().unwrap_or(Path::new(".")).join(&row.file)
}

/// Generates the testbed into `out_dir`, writing one file per instance and
/// `manifest.csv`. Returns the manifest rows in generation order.
pub fn cmd_gen(seed: u64, out_dir: &Path, scale: Scale) -> Result<Vec<ManifestRow>> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let rows = gen_testbed(seed, scale.per_combo())
        .into_iter()
        .map(|t| {
            let file = InstanceFile {
                id: t.id,
                q_kind: Some(t.q_kind),
                seed: Some(t.seed),
                instance: BilevelInstance::Quad(t.instance),
            };
            write_instance_file(out_dir, &file)
        })
        .collect::<Result<Vec<_>>>()?;
    write_manifest(&out_dir.join(MANIFEST_FILE), &rows)?;
    Ok(rows)
}
