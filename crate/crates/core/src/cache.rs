//! Append-only on-disk memo of structure constants.
//!
//! One record per line, tab separated:
//! `quiver-hash  p  op  args  value`. Writers take an exclusive advisory
//! lock on the file; readers take a shared lock while loading. Records are
//! never rewritten, so concurrent appends from other processes are safe.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{HallError, Result};

/// Environment variable overriding the default cache location.
pub const CACHE_ENV: &str = "HALLQ_CACHE";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub quiver: String,
    pub p: u32,
    pub op: String,
    pub args: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub key: CacheKey,
    pub value: String,
}

impl CacheRecord {
    fn to_line(&self) -> String {
        format!("{}\t{}\t{}\t{}\t{}\n", self.key.quiver, self.key.p, self.key.op, self.key.args, self.value)
    }

    fn from_line(line: &str) -> Option<CacheRecord> {
        let mut parts = line.splitn(5, '\t');
        let quiver = parts.next()?.to_string();
        let p = parts.next()?.parse().ok()?;
        let op = parts.next()?.to_string();
        let args = parts.next()?.to_string();
        let value = parts.next()?.to_string();
        Some(CacheRecord { key: CacheKey { quiver, p, op, args }, value })
    }
}

#[derive(Debug)]
pub struct Cache {
    path: PathBuf,
    entries: RwLock<HashMap<CacheKey, String>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl Cache {
    /// Opens (creating if needed) the cache file and loads every record.
    ///
    /// Later records win over earlier ones with the same key; a torn final
    /// line from an interrupted writer is ignored.
    pub fn open(path: impl AsRef<Path>) -> Result<Cache> {
        let path = path.as_ref().to_path_buf();
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        let file = OpenOptions::new().create(true).append(true).read(true).open(&path)?;
        file.lock_shared()?;
        let mut entries = HashMap::new();
        for line in BufReader::new(&file).lines() {
            let line = line?;
            if let Some(rec) = CacheRecord::from_line(&line) {
                entries.insert(rec.key, rec.value);
            }
        }
        file.unlock()?;
        Ok(Cache { path, entries: RwLock::new(entries), hits: AtomicU64::new(0), misses: AtomicU64::new(0) })
    }

    /// `$HALLQ_CACHE`, or `hallq-cache.tsv` in the system temp directory.
    pub fn default_path() -> PathBuf {
        std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| std::env::temp_dir().join("hallq-cache.tsv"))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, key: &CacheKey) -> Option<String> {
        let found = self.entries.read().expect("cache lock").get(key).cloned();
        if found.is_some() {
            self.hits.fetch_add(1, Ordering::Relaxed);
        } else {
            self.misses.fetch_add(1, Ordering::Relaxed);
        }
        found
    }

    pub fn put(&self, key: CacheKey, value: String) -> Result<()> {
        if [&key.quiver, &key.op, &key.args, &value].iter().any(|s| s.contains(['\t', '\n'])) {
            return Err(HallError::Internal("cache fields may not contain tabs or newlines".into()));
        }
        {
            let map = self.entries.read().expect("cache lock");
            if map.get(&key) == Some(&value) {
                return Ok(());
            }
        }
        let rec = CacheRecord { key, value };
        let mut file: File = OpenOptions::new().create(true).append(true).open(&self.path)?;
        file.lock()?;
        let res = file.write_all(rec.to_line().as_bytes()).and_then(|_| file.flush());
        file.unlock()?;
        res?;
        self.entries.write().expect("cache lock").insert(rec.key, rec.value);
        Ok(())
    }

    /// Every loaded record, sorted for deterministic iteration.
    pub fn records(&self) -> Vec<CacheRecord> {
        let mut out: Vec<CacheRecord> = self
            .entries
            .read()
            .expect("cache lock")
            .iter()
            .map(|(k, v)| CacheRecord { key: k.clone(), value: v.clone() })
            .collect();
        out.sort_by(|a, b| {
            (&a.key.quiver, a.key.p, &a.key.op, &a.key.args).cmp(&(&b.key.quiver, b.key.p, &b.key.op, &b.key.args))
        });
        out
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }
}
