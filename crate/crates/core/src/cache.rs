//! Persistent verdict cache, a JSON object keyed by `"n,m,c"`.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::grid::GridDims;
use crate::obstruction::Status;

/// Env var that overrides the cache location.
pub const CACHE_ENV: &str = "GRIDCOLOR_CACHE";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedVerdict {
    pub status: Status,
    pub rule: String,
    pub witness_ref: Option<String>,
}

/// Decided verdicts only; Unknown is never stored. Keys made under the
/// conditional RFC assumption carry an `rfc` suffix.
#[derive(Debug, Default)]
pub struct VerdictCache {
    path: Option<PathBuf>,
    entries: Mutex<BTreeMap<String, CachedVerdict>>,
}

pub fn cache_key(n: usize, m: usize, c: u32, assume_rfc: bool) -> String {
    let (n, m) = (n.min(m), n.max(m));
    if assume_rfc {
        format!("{n},{m},{c},rfc")
    } else {
        format!("{n},{m},{c}")
    }
}

fn parse_key(key: &str) -> Option<(usize, usize, u32, bool)> {
    let mut it = key.split(',');
    let n = it.next()?.parse().ok()?;
    let m = it.next()?.parse().ok()?;
    let c = it.next()?.parse().ok()?;
    let rfc = match it.next() {
        None => false,
        Some("rfc") => true,
        Some(_) => return None,
    };
    Some((n, m, c, rfc))
}

impl VerdictCache {
    pub fn in_memory() -> Self {
        VerdictCache::default()
    }

    /// Load from `path`; a missing file starts empty.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let entries = match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e),
        };
        Ok(VerdictCache {
            path: Some(path),
            entries: Mutex::new(entries),
        })
    }

    pub fn get(&self, n: usize, m: usize, c: u32, assume_rfc: bool) -> Option<CachedVerdict> {
        self.entries
            .lock()
            .unwrap()
            .get(&cache_key(n, m, c, assume_rfc))
            .cloned()
    }

    pub fn put(&self, n: usize, m: usize, c: u32, assume_rfc: bool, v: CachedVerdict) {
        if v.status != Status::Unknown {
            self.entries.lock().unwrap().insert(cache_key(n, m, c, assume_rfc), v);
        }
    }

    /// A cached verdict that settles `d` by containment: a Colorable grid
    /// containing it or a NotColorable grid inside it, in either orientation.
    pub fn implied(&self, d: GridDims, c: u32, assume_rfc: bool) -> Option<(GridDims, CachedVerdict)> {
        let entries = self.entries.lock().unwrap();
        for (key, v) in entries.iter() {
            let Some((n, m, kc, rfc)) = parse_key(key) else {
                continue;
            };
            if kc != c || rfc != assume_rfc {
                continue;
            }
            for g in [GridDims { n, m }, GridDims { n: m, m: n }] {
                let hit = match v.status {
                    Status::Colorable => g.contains(d),
                    Status::NotColorable => d.contains(g),
                    Status::Unknown => false,
                };
                if hit {
                    return Some((g, v.clone()));
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Write back to the file this cache was opened from, if any.
    pub fn save(&self) -> io::Result<()> {
        let Some(path) = &self.path else { return Ok(()) };
        let text = serde_json::to_string_pretty(&*self.entries.lock().unwrap())?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text)?;
        fs::rename(tmp, path)
    }
}
