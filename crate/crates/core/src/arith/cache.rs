//! Binary table cache.
//!
//! Layout (all integers little-endian):
//!
//! | bytes | field |
//! |-------|-------|
//! | 6     | magic `PNTAP1` |
//! | 2     | format version (u16, currently 1) |
//! | 8     | limit (u64) |
//! | 8     | FNV-1a 64 checksum of the payload |
//! | ...   | payload: spf, gpf (u32), mu (i8), phi, mangoldt_p (u32), mangoldt_k (u8), each `limit + 1` entries |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::tables::{ArithmeticTables, TableConfig};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 6] = b"PNTAP1";
pub const FORMAT_VERSION: u16 = 1;

struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }

    fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
}

fn payload(t: &ArithmeticTables) -> Vec<u8> {
    let n = t.spf.len();
    let mut out = Vec::with_capacity(n * 18);
    for v in [&t.spf, &t.gpf] {
        v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes()));
    }
    out.extend(t.mu.iter().map(|&m| m as u8));
    for v in [&t.phi, &t.mangoldt_p] {
        v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes()));
    }
    out.extend_from_slice(&t.mangoldt_k);
    out
}

pub fn write_cache(tables: &ArithmeticTables, path: &Path) -> Result<()> {
    let body = payload(tables);
    let mut h = Fnv1a::new();
    h.update(&body);
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&tables.limit.to_le_bytes())?;
    w.write_all(&h.0.to_le_bytes())?;
    w.write_all(&body)?;
    w.flush()?;
    Ok(())
}

fn read_u32s(bytes: &[u8]) -> Vec<u32> {
    bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect()
}

pub fn read_cache(path: &Path) -> Result<ArithmeticTables> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = [0u8; 24];
    r.read_exact(&mut header)
        .map_err(|_| Error::Cache("truncated header".into()))?;
    if &header[..6] != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = u16::from_le_bytes([header[6], header[7]]);
    if version != FORMAT_VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let limit = u64::from_le_bytes(header[8..16].try_into().unwrap());
    let checksum = u64::from_le_bytes(header[16..24].try_into().unwrap());
    if limit == 0 || limit > TableConfig::default().max_limit() {
        return Err(Error::Cache(format!("implausible limit {limit}")));
    }
    let n = limit as usize + 1;
    let mut body = Vec::with_capacity(n * 18);
    r.read_to_end(&mut body)?;
    if body.len() != n * 18 {
        return Err(Error::Cache(format!(
            "payload is {} bytes, expected {}",
            body.len(),
            n * 18
        )));
    }
    let mut h = Fnv1a::new();
    h.update(&body);
    if h.0 != checksum {
        return Err(Error::Cache("checksum mismatch".into()));
    }
    let (spf, rest) = body.split_at(4 * n);
    let (gpf, rest) = rest.split_at(4 * n);
    let (mu, rest) = rest.split_at(n);
    let (phi, rest) = rest.split_at(4 * n);
    let (mp, mk) = rest.split_at(4 * n);
    let spf = read_u32s(spf);
    let primes = (2..n).filter(|&i| spf[i] as usize == i).map(|i| i as u32).collect();
    Ok(ArithmeticTables {
        limit,
        spf,
        gpf: read_u32s(gpf),
        mu: mu.iter().map(|&b| b as i8).collect(),
        phi: read_u32s(phi),
        mangoldt_p: read_u32s(mp),
        mangoldt_k: mk.to_vec(),
        primes,
    })
}

/// Loads tables from `path` when it holds a cache covering `limit`, otherwise
/// sieves and (re)writes the cache.
pub fn load_or_build(limit: u64, path: Option<&Path>, config: &TableConfig) -> Result<ArithmeticTables> {
    if let Some(p) = path {
        if p.exists() {
            let cached = read_cache(p)?;
            if cached.limit == limit {
                return Ok(cached);
            }
        }
    }
    let tables = ArithmeticTables::build_with(limit, config)?;
    if let Some(p) = path {
        write_cache(&tables, p)?;
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.bin");
        let t = ArithmeticTables::build(3000).unwrap();
        write_cache(&t, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..6], b"PNTAP1");
        assert_eq!(read_cache(&path).unwrap(), t);

        let mut bad = bytes.clone();
        let last = bad.len() - 1;
        bad[last] ^= 1;
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(read_cache(&path), Err(Error::Cache(_))));

        let mut bad = bytes;
        bad[0] = b'X';
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(read_cache(&path), Err(Error::Cache(_))));
    }

    #[test]
    fn load_or_build_rebuilds_on_limit_change() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.bin");
        let cfg = TableConfig::default();
        let a = load_or_build(100, Some(&path), &cfg).unwrap();
        let b = load_or_build(200, Some(&path), &cfg).unwrap();
        assert_eq!(a.limit(), 100);
        assert_eq!(b.limit(), 200);
        assert_eq!(read_cache(&path).unwrap().limit(), 200);
    }
}
