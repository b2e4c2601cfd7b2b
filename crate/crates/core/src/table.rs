//! Shared transposition table and its on-disk format.
//!
//! The table maps canonical keys to Grundy values. Values for a key are
//! unique, so concurrent writers may race on the same key without harm.
//!
//! File format (line oriented, UTF-8):
//!
//! ```text
//! STRNIMCACHE 1
//! <canonical-rle>\t<grundy>
//! ...
//! ```
//!
//! Entries are written sorted by key and the file ends with a newline.

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;
use thiserror::Error;

use crate::position::CanonicalKey;
use crate::solver::Grundy;

pub const CACHE_HEADER: &str = "STRNIMCACHE 1";
const CACHE_MAGIC: &str = "STRNIMCACHE";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("unsupported cache version {0:?} (expected 1)")]
    Version(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TableStats {
    pub hits: u64,
    pub misses: u64,
    pub entries: usize,
}

#[derive(Debug, Default)]
pub struct TranspositionTable {
    entries: DashMap<CanonicalKey, u32>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl TranspositionTable {
    pub fn new() -> TranspositionTable {
        TranspositionTable::default()
    }

    /// Looks up a key and records a hit or miss.
    pub fn probe(&self, key: &CanonicalKey) -> Option<Grundy> {
        match self.entries.get(key) {
            Some(v) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(Grundy(*v))
            }
            None => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    /// Looks up a key without touching the counters.
    pub fn peek(&self, key: &CanonicalKey) -> Option<Grundy> {
        self.entries.get(key).map(|v| Grundy(*v))
    }

    pub fn insert(&self, key: CanonicalKey, value: Grundy) {
        let previous = self.entries.insert(key, value.0);
        debug_assert!(previous.is_none_or(|p| p == value.0));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn stats(&self) -> TableStats {
        TableStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            entries: self.entries.len(),
        }
    }

    /// All entries sorted by key.
    pub fn snapshot(&self) -> Vec<(CanonicalKey, Grundy)> {
        let mut out: Vec<_> = self
            .entries
            .iter()
            .map(|e| (e.key().clone(), Grundy(*e.value())))
            .collect();
        out.sort();
        out
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", CACHE_HEADER)?;
        for (key, value) in self.snapshot() {
            writeln!(out, "{}\t{}", key, value.0)?;
        }
        out.flush()
    }

    pub fn save_cache(&self, path: &Path) -> Result<(), CacheError> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        fs::write(path, buf)?;
        Ok(())
    }

    pub fn load_cache(path: &Path) -> Result<TranspositionTable, CacheError> {
        let text = fs::read_to_string(path)?;
        TranspositionTable::from_cache_text(&text)
    }

    pub fn from_cache_text(text: &str) -> Result<TranspositionTable, CacheError> {
        let table = TranspositionTable::new();
        table.merge_cache_text(text)?;
        Ok(table)
    }

    /// Parses cache text and adds its entries. Nothing is inserted unless the
    /// whole text validates.
    pub fn merge_cache_text(&self, text: &str) -> Result<(), CacheError> {
        if !text.ends_with('\n') {
            let line = text.lines().count().max(1);
            return Err(CacheError::Malformed {
                line,
                message: "missing trailing newline".into(),
            });
        }
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        if header != CACHE_HEADER {
            return match header.strip_prefix(CACHE_MAGIC).map(str::trim) {
                Some(version) if !version.is_empty() => Err(CacheError::Version(version.to_string())),
                _ => Err(CacheError::Malformed {
                    line: 1,
                    message: format!("expected header {:?}", CACHE_HEADER),
                }),
            };
        }
        let parsed = DashMap::new();
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let malformed = |message: String| CacheError::Malformed { line: line_no, message };
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected <key>\\t<grundy>".into()))?;
            let key = CanonicalKey::from_rle(key).map_err(|e| malformed(e.to_string()))?;
            if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed(format!("invalid grundy value {:?}", value)));
            }
            let value: u32 = value
                .parse()
                .map_err(|_| malformed(format!("invalid grundy value {:?}", value)))?;
            if parsed.insert(key.clone(), value).is_some() {
                return Err(malformed(format!("duplicate key {}", key)));
            }
        }
        for (k, v) in parsed {
            self.entries.insert(k, v);
        }
        Ok(())
    }
}
