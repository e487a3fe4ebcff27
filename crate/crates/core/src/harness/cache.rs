use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::quadratic::{class_data, fundamental_unit, ClassData, PellSolution};
use crate::{Error, Result};

pub const CACHE_FORMAT: &str = "two-tower-class-cache";
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub d: i64,
    pub h_wide: u64,
    pub h_narrow: u64,
    pub h2: u64,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pell: Option<PellSolution>,
}

impl CacheEntry {
    pub fn from_class_data(c: &ClassData, pell: Option<PellSolution>) -> Self {
        Self { d: c.d, h_wide: c.h_wide, h_narrow: c.h_narrow, h2: c.h2, m: c.m, pell }
    }

    pub fn class_data(&self) -> ClassData {
        let disc = crate::quadratic::field_discriminant(self.d);
        ClassData { d: self.d, disc, h_wide: self.h_wide, h_narrow: self.h_narrow, h2: self.h2, m: self.m }
    }

    /// Recomputes the entry from scratch.
    pub fn recompute(d: i64, with_pell: bool) -> Result<Self> {
        let c = class_data(d)?;
        let pell = if with_pell && d > 1 { Some(fundamental_unit(d as u64)?) } else { None };
        Ok(Self::from_class_data(&c, pell))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub entries: usize,
    pub corrupt: usize,
}

/// Reads a cache file. A missing or empty file is an empty cache; lines
/// that do not parse are skipped and counted; a header with another format
/// version rejects the file.
pub fn cache_load(path: &Path) -> Result<(BTreeMap<i64, CacheEntry>, LoadStats)> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((BTreeMap::new(), LoadStats::default())),
        Err(e) => return Err(Error::Cache(format!("{}: {e}", path.display()))),
    };
    let mut lines = BufReader::new(file).lines();
    let mut map = BTreeMap::new();
    let mut stats = LoadStats::default();
    let Some(first) = lines.next() else { return Ok((map, stats)) };
    let first = first.map_err(|e| Error::Cache(e.to_string()))?;
    if first.trim().is_empty() && lines.size_hint().1 == Some(0) {
        return Ok((map, stats));
    }
    let header: Header = serde_json::from_str(&first).map_err(|e| Error::Cache(format!("{}: missing or unreadable header: {e}", path.display())))?;
    if header.format != CACHE_FORMAT || header.version != CACHE_VERSION {
        return Err(Error::Cache(format!(
            "{}: format {:?} version {} is not {CACHE_FORMAT:?} version {CACHE_VERSION}",
            path.display(),
            header.format,
            header.version
        )));
    }
    for line in lines {
        let line = line.map_err(|e| Error::Cache(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CacheEntry>(&line) {
            Ok(e) => {
                map.insert(e.d, e);
            }
            Err(_) => stats.corrupt += 1,
        }
    }
    if stats.corrupt > 0 {
        log::warn!("{}: skipped {} corrupt cache line(s)", path.display(), stats.corrupt);
    }
    stats.entries = map.len();
    Ok((map, stats))
}

/// Writes the cache, replacing the file through a rename.
pub fn cache_store(path: &Path, entries: &BTreeMap<i64, CacheEntry>) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
    {
        let mut w = BufWriter::new(fs::File::create(&tmp).map_err(io)?);
        let header = Header { format: CACHE_FORMAT.into(), version: CACHE_VERSION };
        writeln!(w, "{}", serde_json::to_string(&header).expect("header serializes")).map_err(io)?;
        for e in entries.values() {
            writeln!(w, "{}", serde_json::to_string(e).expect("entry serializes")).map_err(io)?;
        }
        w.flush().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}

/// Shared memo of quadratic class data for scans.
#[derive(Debug, Default)]
pub struct ClassCache {
    entries: RwLock<BTreeMap<i64, CacheEntry>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl ClassCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: BTreeMap<i64, CacheEntry>) -> Self {
        Self { entries: RwLock::new(entries), ..Self::default() }
    }

    pub fn load(path: &Path) -> Result<(Self, LoadStats)> {
        let (map, stats) = cache_load(path)?;
        Ok((Self::from_entries(map), stats))
    }

    pub fn store(&self, path: &Path) -> Result<()> {
        cache_store(path, &self.entries.read().expect("cache lock"))
    }

    pub fn class_data(&self, d: i64) -> Result<ClassData> {
        if let Some(e) = self.entries.read().expect("cache lock").get(&d) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(e.class_data());
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let c = class_data(d)?;
        self.entries.write().expect("cache lock").entry(d).or_insert_with(|| CacheEntry::from_class_data(&c, None));
        Ok(c)
    }

    pub fn snapshot(&self) -> BTreeMap<i64, CacheEntry> {
        self.entries.read().expect("cache lock").clone()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    /// Entries that do not match a fresh computation.
    pub fn verify(&self) -> Result<Vec<i64>> {
        let mut bad = Vec::new();
        for (d, e) in self.snapshot() {
            if CacheEntry::recompute(d, e.pell.is_some())? != e {
                bad.push(d);
            }
        }
        Ok(bad)
    }
}
