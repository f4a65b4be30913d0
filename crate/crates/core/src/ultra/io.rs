//! Binary shortcut files: a fixed little-endian header (magic, network
//! hash, delay limit, record count) followed by one record per shortcut,
//! plus a text export for diffing.

use super::{Shortcut, ShortcutSet};
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: [u8; 8] = *b"TCSHCT01";

#[derive(Debug, thiserror::Error)]
pub enum ShortcutIoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a shortcut file (bad magic)")]
    BadMagic,
    #[error("shortcut file was built for a different network (hash {file:#x}, expected {expected:#x})")]
    NetworkMismatch { file: u64, expected: u64 },
    #[error("truncated shortcut file")]
    Truncated,
}

pub fn write_shortcuts(set: &ShortcutSet, path: impl AsRef<Path>) -> Result<(), ShortcutIoError> {
    let mut buf: Vec<u8> = Vec::with_capacity(32 + set.len() * 28);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&set.network_hash.to_le_bytes());
    buf.extend_from_slice(&(set.max_delay as i32).to_le_bytes());
    buf.extend_from_slice(&(set.len() as u64).to_le_bytes());
    for s in set.iter_sorted() {
        buf.extend_from_slice(&s.origin.0.to_le_bytes());
        buf.extend_from_slice(&s.destination.0.to_le_bytes());
        buf.extend_from_slice(&(s.transfer_time as u32).to_le_bytes());
        buf.extend_from_slice(&(s.min_origin_delay as i32).to_le_bytes());
        buf.extend_from_slice(&(s.max_origin_delay.max(-1 - set.max_delay) as i32).to_le_bytes());
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

/// Reads a shortcut file; `expected_hash`, when given, must match the
/// stored network hash.
pub fn read_shortcuts(
    path: impl AsRef<Path>,
    expected_hash: Option<u64>,
) -> Result<ShortcutSet, ShortcutIoError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 28 || bytes[..8] != MAGIC {
        return Err(ShortcutIoError::BadMagic);
    }
    let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let i32_at = |i: usize| i32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let hash = u64_at(8);
    if let Some(expected) = expected_hash {
        if hash != expected {
            return Err(ShortcutIoError::NetworkMismatch {
                file: hash,
                expected,
            });
        }
    }
    let max_delay = i32_at(16) as i64;
    let count = u64_at(20) as usize;
    if bytes.len() < 28 + count * 20 {
        return Err(ShortcutIoError::Truncated);
    }
    let mut set = ShortcutSet::new(max_delay, hash);
    for k in 0..count {
        let o = 28 + k * 20;
        set.insert(Shortcut {
            origin: crate::types::EventId(u32_at(o)),
            destination: crate::types::EventId(u32_at(o + 4)),
            transfer_time: u32_at(o + 8) as i64,
            min_origin_delay: i32_at(o + 12) as i64,
            max_origin_delay: i32_at(o + 16) as i64,
        });
    }
    Ok(set)
}

/// Text form, one `origin dest transfer lo hi` line per shortcut.
pub fn write_shortcuts_text(set: &ShortcutSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# hash={:#x} max_delay={} count={}", set.network_hash, set.max_delay, set.len());
    for s in set.iter_sorted() {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            s.origin, s.destination, s.transfer_time, s.min_origin_delay, s.max_origin_delay
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::EventId;

    #[test]
    fn roundtrip() {
        let mut set = ShortcutSet::new(300, 0xdead);
        set.insert(Shortcut {
            origin: EventId(5),
            destination: EventId(9),
            transfer_time: 77,
            min_origin_delay: 0,
            max_origin_delay: 120,
        });
        set.insert(Shortcut {
            origin: EventId(1),
            destination: EventId(2),
            transfer_time: 30,
            min_origin_delay: 4,
            max_origin_delay: 300,
        });
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("shortcuts.bin");
        write_shortcuts(&set, &path).unwrap();
        let back = read_shortcuts(&path, Some(0xdead)).unwrap();
        assert_eq!(set.iter_sorted(), back.iter_sorted());
        assert_eq!(back.max_delay, 300);
        assert!(read_shortcuts(&path, Some(0xbeef)).is_err());
    }
}
