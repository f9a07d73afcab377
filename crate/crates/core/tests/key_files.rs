use learned_dict::workloads::{load_keys, load_raw, save_keys, save_raw};
use learned_dict::{Error, SortedKeySet};

#[test]
fn layout_is_count_then_little_endian_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.bin");
    save_raw(&[1, 0x0102_0304_0506_0708, u64::MAX], &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let mut expected = vec![3, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0];
    expected.extend([8, 7, 6, 5, 4, 3, 2, 1]);
    expected.extend([0xff; 8]);
    assert_eq!(bytes, expected);
}

#[test]
fn round_trip_sorts_and_counts_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.bin");
    save_raw(&[9, 3, 9, 1], &path).unwrap();
    assert_eq!(load_raw(&path).unwrap(), vec![9, 3, 9, 1]);
    let loaded = load_keys(&path).unwrap();
    assert_eq!(loaded.keys.as_slice(), &[1, 3, 9]);
    assert_eq!(loaded.duplicates_removed, 1);

    let set = SortedKeySet::new(vec![5, 6, 7]).unwrap();
    save_keys(&set, &path).unwrap();
    assert_eq!(load_keys(&path).unwrap().keys, set);
}

#[test]
fn malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.bin");

    std::fs::write(&path, [1, 0, 0]).unwrap();
    assert!(matches!(load_raw(&path), Err(Error::Truncated { offset: 3 })));

    // header promises two keys, only one follows
    let mut short = 2u64.to_le_bytes().to_vec();
    short.extend(7u64.to_le_bytes());
    std::fs::write(&path, &short).unwrap();
    assert!(matches!(load_raw(&path), Err(Error::Truncated { offset: 16 })));

    let mut long = 1u64.to_le_bytes().to_vec();
    long.extend(7u64.to_le_bytes());
    long.extend([0, 0, 0]);
    std::fs::write(&path, &long).unwrap();
    assert!(matches!(load_raw(&path), Err(Error::CountMismatch { declared: 1, offset: 16 })));

    assert!(matches!(load_raw(dir.path().join("missing.bin")), Err(Error::Io { .. })));
}

#[test]
fn empty_file_with_zero_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.bin");
    save_raw(&[], &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), vec![0; 8]);
    assert!(load_keys(&path).unwrap().keys.is_empty());
}
