//! Append-only JSON Lines store of computed values.
//!
//! One record per line. Readers skip lines they cannot parse (with a
//! warning) and ignore kinds they do not know, so older binaries can read
//! files written by newer ones. Writers take an exclusive advisory lock for
//! the append; readers take a shared one.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mzv_core::evaluator::{Backend, MzvValue};
use mzv_core::Index;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const FILE_NAME: &str = "values.jsonl";

pub const KIND_MZV: &str = "mzv";
pub const KIND_LI_HALF: &str = "li_half";
pub const KIND_TRANSPORT_COEFF: &str = "transport_coeff";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub schema_version: u32,
    /// `mzv`, `li_half`, `transport_coeff`; anything else is carried along.
    pub kind: String,
    pub key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    pub precision: u32,
    pub value: String,
    pub bound: String,
    pub created_at: String,
}

impl CacheRecord {
    pub fn from_mzv(v: &MzvValue) -> Self {
        CacheRecord {
            schema_version: SCHEMA_VERSION,
            kind: KIND_MZV.into(),
            key: mzv_key(&v.index),
            index: Some(v.index.to_string()),
            weight: Some(v.index.weight()),
            backend: Some(v.backend.to_string()),
            precision: v.prec,
            value: v.decimal(),
            bound: format!("{:e}", v.error_bound),
            created_at: chrono::Utc::now().to_rfc3339(),
        }
    }

    pub fn bound_f64(&self) -> Option<f64> {
        self.bound.parse().ok()
    }
}

/// Canonical key of an index: its normalized comma spelling.
pub fn mzv_key(idx: &Index) -> String {
    idx.to_string()
}

#[derive(Debug, Default)]
pub struct Loaded {
    pub records: Vec<CacheRecord>,
    /// Lines that failed to parse, as `(line number, error)`.
    pub skipped: Vec<(usize, String)>,
}

#[derive(Clone, Debug)]
pub struct Cache {
    path: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
        Ok(Cache { path: dir.join(FILE_NAME) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn load(&self) -> Result<Loaded> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Loaded::default()),
            Err(e) => return Err(e).with_context(|| format!("opening {}", self.path.display())),
        };
        file.lock_shared().context("locking cache for reading")?;
        let mut out = Loaded::default();
        for (i, line) in BufReader::new(&file).lines().enumerate() {
            let line = match line {
                Ok(l) => l,
                Err(e) => {
                    out.skipped.push((i + 1, e.to_string()));
                    continue;
                }
            };
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<CacheRecord>(&line) {
                Ok(r) => out.records.push(r),
                Err(e) => out.skipped.push((i + 1, e.to_string())),
            }
        }
        file.unlock().ok();
        Ok(out)
    }

    pub fn append(&self, rec: &CacheRecord) -> Result<()> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .with_context(|| format!("opening {}", self.path.display()))?;
        file.lock().context("locking cache for writing")?;
        let mut line = serde_json::to_string(rec)?;
        line.push('\n');
        let r = file.write_all(line.as_bytes());
        file.unlock().ok();
        r.context("appending cache record")
    }

    pub fn clear(&self) -> Result<()> {
        match fs::remove_file(&self.path) {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
            Err(e) => Err(e).with_context(|| format!("removing {}", self.path.display())),
        }
    }
}

impl Loaded {
    /// Latest `mzv` record for `(index, backend, precision)`.
    pub fn find_mzv(&self, idx: &Index, backend: Backend, precision: u32) -> Option<&CacheRecord> {
        let key = mzv_key(idx);
        let backend = backend.to_string();
        self.records.iter().rev().find(|r| {
            r.kind == KIND_MZV && r.key == key && r.backend.as_deref() == Some(&backend) && r.precision == precision
        })
    }
}
