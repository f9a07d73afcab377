//! Binary key files: a little-endian `u64` count followed by that many
//! little-endian `u64` keys.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::keys::SortedKeySet;

const WORD: u64 = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedKeys {
    pub keys: SortedKeySet,
    pub duplicates_removed: usize,
}

/// Reads a key file verbatim, without sorting.
pub fn load_raw(path: impl AsRef<Path>) -> Result<Vec<u64>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let len = bytes.len() as u64;
    if len < WORD {
        return Err(Error::Truncated { offset: len });
    }
    let declared = u64::from_le_bytes(bytes[..8].try_into().unwrap());
    let expected = declared.checked_mul(WORD).and_then(|b| b.checked_add(WORD));
    match expected {
        Some(e) if e == len => {}
        Some(e) if e < len => return Err(Error::CountMismatch { declared, offset: e }),
        _ => return Err(Error::Truncated { offset: len }),
    }
    Ok(bytes[8..].chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect())
}

/// Reads a key file, sorting and deduplicating its contents.
pub fn load_keys(path: impl AsRef<Path>) -> Result<LoadedKeys> {
    let (keys, duplicates_removed) = SortedKeySet::from_unsorted(load_raw(path)?);
    Ok(LoadedKeys { keys, duplicates_removed })
}

/// Writes `keys` in the order given.
pub fn save_raw(keys: &[u64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    w.write_all(&(keys.len() as u64).to_le_bytes()).map_err(io)?;
    for &k in keys {
        w.write_all(&k.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn save_keys(keys: &SortedKeySet, path: impl AsRef<Path>) -> Result<()> {
    save_raw(keys.as_slice(), path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_bytes(dir: &tempfile::TempDir, name: &str, bytes: &[u8]) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, bytes).unwrap();
        p
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("k.bin");
        let keys = SortedKeySet::new(vec![1, 2, 3]).unwrap();
        save_keys(&keys, &p).unwrap();
        let before = std::fs::read(&p).unwrap();
        assert_eq!(before.len(), 32);
        let loaded = load_keys(&p).unwrap();
        assert_eq!(loaded.keys, keys);
        assert_eq!(loaded.duplicates_removed, 0);
        save_keys(&loaded.keys, &p).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), before);
    }

    #[test]
    fn dedups_on_load() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.bin");
        save_raw(&[5, 3, 5], &p).unwrap();
        let loaded = load_keys(&p).unwrap();
        assert_eq!(loaded.keys.as_slice(), &[3, 5]);
        assert_eq!(loaded.duplicates_removed, 1);
    }

    #[test]
    fn truncated_and_mismatched() {
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = 10u64.to_le_bytes().to_vec();
        bytes.extend_from_slice(&[0u8; 16]);
        let p = write_bytes(&dir, "t.bin", &bytes);
        assert_eq!(load_keys(&p).unwrap_err().to_string(), "truncated at offset 24");
        let p = write_bytes(&dir, "h.bin", &[1, 2, 3]);
        assert_eq!(load_keys(&p).unwrap_err().to_string(), "truncated at offset 3");
        let mut bytes = 1u64.to_le_bytes().to_vec();
        bytes.extend_from_slice(&[0u8; 12]);
        let p = write_bytes(&dir, "m.bin", &bytes);
        assert!(matches!(load_keys(&p), Err(Error::CountMismatch { declared: 1, offset: 16 })));
        let p = write_bytes(&dir, "huge.bin", &u64::MAX.to_le_bytes());
        assert!(matches!(load_keys(&p), Err(Error::Truncated { offset: 8 })));
        assert!(matches!(load_keys(dir.path().join("missing.bin")), Err(Error::Io { .. })));
    }

    #[test]
    fn empty_file_with_zero_count() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_bytes(&dir, "z.bin", &0u64.to_le_bytes());
        assert!(load_keys(&p).unwrap().keys.is_empty());
    }
}
