//! Field snapshots: raw little-endian `f64` samples in storage order
//! (`<stem>.bin`) plus a JSON sidecar with the grid and run metadata
//! (`<stem>.json`).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Field, Grid};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub dim: usize,
    #[serde(rename = "M")]
    pub points: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub time: f64,
    pub scheme: String,
    pub potential: String,
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut name = stem.as_os_str().to_owned();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

/// Writes `<stem>.bin` and `<stem>.json`. The grid fields of `meta` are
/// overwritten from the field.
pub fn write_snapshot(stem: &Path, field: &Field, meta: &SnapshotMeta) -> Result<()> {
    let grid = field.grid();
    let meta = SnapshotMeta {
        dim: grid.dim(),
        points: grid.points(),
        length: grid.length(),
        ..meta.clone()
    };
    let mut bytes = Vec::with_capacity(field.len() * 8);
    for v in field.as_slice() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    let bin = with_ext(stem, "bin");
    fs::write(&bin, bytes).map_err(|e| Error::io(&bin, e))?;
    let json = with_ext(stem, "json");
    let text = serde_json::to_string_pretty(&meta)?;
    fs::write(&json, text).map_err(|e| Error::io(&json, e))?;
    Ok(())
}

pub fn read_snapshot(stem: &Path) -> Result<(Field, SnapshotMeta)> {
    let json = with_ext(stem, "json");
    let text = fs::read_to_string(&json).map_err(|e| Error::io(&json, e))?;
    let meta: SnapshotMeta = serde_json::from_str(&text)?;
    let grid = Grid::new(meta.dim, meta.points, meta.length)?;
    let bin = with_ext(stem, "bin");
    let bytes = fs::read(&bin).map_err(|e| Error::io(&bin, e))?;
    if bytes.len() != grid.len() * 8 {
        return Err(Error::FieldLength {
            expected: grid.len(),
            actual: bytes.len() / 8,
        });
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok((Field::new(grid, data)?, meta))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn round_trip_is_bit_exact(
            dim in 1usize..=2,
            m in 2usize..9,
            seed in any::<u64>(),
        ) {
            let grid = Grid::new(dim, m, 2.5).unwrap();
            let field = Field::from_fn(grid, |x| ((seed as f64) * 1e-3 + x[0] * 3.1 - x[1]).sin());
            let dir = tempfile::tempdir().unwrap();
            let stem = dir.path().join("snap");
            let meta = SnapshotMeta {
                dim: 0, points: 0, length: 0.0,
                time: 0.125, scheme: "ss2".into(), potential: "poly".into(),
            };
            write_snapshot(&stem, &field, &meta).unwrap();
            let (back, m2) = read_snapshot(&stem).unwrap();
            prop_assert_eq!(back.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            field.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            prop_assert_eq!(m2.points, m);
            prop_assert_eq!(m2.dim, dim);
            prop_assert_eq!(m2.time, 0.125);
        }
    }

    #[test]
    fn sidecar_uses_documented_keys() {
        let grid = Grid::one_d(4, 1.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("s");
        let meta = SnapshotMeta {
            dim: 1,
            points: 4,
            length: 1.0,
            time: 0.0,
            scheme: "ess1".into(),
            potential: "log:0.8,1.6".into(),
        };
        write_snapshot(&stem, &Field::zeros(grid), &meta).unwrap();
        let text = std::fs::read_to_string(dir.path().join("s.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["dim", "M", "L", "time", "scheme", "potential"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(std::fs::read(dir.path().join("s.bin")).unwrap().len(), 32);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let grid = Grid::one_d(4, 1.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("s");
        let meta = SnapshotMeta {
            dim: 1,
            points: 4,
            length: 1.0,
            time: 0.0,
            scheme: "ess1".into(),
            potential: "poly".into(),
        };
        write_snapshot(&stem, &Field::zeros(grid), &meta).unwrap();
        std::fs::write(dir.path().join("s.bin"), [0u8; 24]).unwrap();
        assert!(read_snapshot(&stem).is_err());
    }
}
