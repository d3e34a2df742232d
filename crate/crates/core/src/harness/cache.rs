//! On-disk cache of reference solutions, keyed by a hash of everything that
//! determines them. Entries use the snapshot format.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::{read_snapshot, write_snapshot, SnapshotMeta};
use crate::grid::Field;

#[derive(Clone, Debug)]
pub struct ReferenceCache {
    dir: PathBuf,
}

/// Hex SHA-256 of the JSON encoding of `key`.
pub fn cache_key<K: Serialize>(key: &K) -> Result<String> {
    let bytes = serde_json::to_vec(key)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Hex SHA-256 of the samples of a field, for use inside cache keys.
pub fn field_digest(field: &Field) -> String {
    let mut hasher = Sha256::new();
    for v in field.as_slice() {
        hasher.update(v.to_le_bytes());
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl ReferenceCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn stem<K: Serialize>(&self, key: &K) -> Result<PathBuf> {
        Ok(self.dir.join(format!("ref-{}", cache_key(key)?)))
    }

    pub fn get<K: Serialize>(&self, key: &K) -> Result<Option<Field>> {
        let stem = self.stem(key)?;
        if !stem.with_extension("bin").exists() {
            return Ok(None);
        }
        Ok(Some(read_snapshot(&stem)?.0))
    }

    /// Returns the stored field for `key`, computing and storing it on a
    /// miss. The flag is true on a hit.
    pub fn get_or_compute<K, F>(&self, key: &K, meta: &SnapshotMeta, compute: F) -> Result<(Field, bool)>
    where
        K: Serialize,
        F: FnOnce() -> Result<Field>,
    {
        if let Some(field) = self.get(key)? {
            return Ok((field, true));
        }
        let field = compute()?;
        write_snapshot(&self.stem(key)?, &field, meta)?;
        Ok((field, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn hit_returns_identical_bits() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ReferenceCache::new(dir.path()).unwrap();
        let g = Grid::two_d(8, 1.0).unwrap();
        let field = Field::from_fn(g, |x| (x[0] * 3.1).sin() / 7.0 + x[1]);
        let meta = SnapshotMeta {
            dim: 2,
            points: 8,
            length: 1.0,
            time: 0.5,
            scheme: "ss2".into(),
            potential: "poly".into(),
        };
        let key = ("ref", 8, 0.5);
        let (a, hit) = cache.get_or_compute(&key, &meta, || Ok(field.clone())).unwrap();
        assert!(!hit);
        let (b, hit) = cache
            .get_or_compute(&key, &meta, || panic!("must not recompute"))
            .unwrap();
        assert!(hit);
        assert_eq!(a.as_slice(), b.as_slice());
        assert!(cache.get(&("ref", 8, 0.25)).unwrap().is_none());
        assert_ne!(cache_key(&key).unwrap(), cache_key(&("ref", 8, 0.25)).unwrap());
    }
}
