//! On-disk feature database format.
//!
//! Little-endian layout, bit-exact and free of timestamps so identical
//! inputs always produce identical files:
//!
//! ```text
//! magic   6 bytes  "MIXHDB"
//! version 2 bytes  "01"
//! scheme  4 x u16  n_h, n_s, n_v, n_q
//! count   u64      number of records
//! record  u32 + utf8 image id, u32 + utf8 category,
//!         feature_len x f64 vector
//! crc     u32      CRC-32 (IEEE) of every preceding byte
//! ```

use std::io;
use std::path::{Path, PathBuf};

use mixhist_core::db::{DbError, FeatureDb, FeatureRecord};
use mixhist_core::descriptor::{DescriptorError, FeatureVector};
use mixhist_core::scheme::{QuantizationScheme, SchemeError};
use thiserror::Error;

pub const MAGIC: &[u8; 6] = b"MIXHDB";
pub const VERSION: &[u8; 2] = b"01";

#[derive(Debug, Error)]
pub enum DbFileError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("not a feature database (bad magic)")]
    BadMagic,
    #[error("unsupported database version {found:?} (expected {expected:?})")]
    VersionMismatch { found: String, expected: String },
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("truncated database: needed {needed} more bytes for {what}")]
    Truncated { what: &'static str, needed: usize },
    #[error("malformed database: {0}")]
    Malformed(String),
    #[error("invalid scheme: {0}")]
    Scheme(#[from] SchemeError),
    #[error("invalid vector: {0}")]
    Vector(#[from] DescriptorError),
    #[error("invalid records: {0}")]
    Records(#[from] DbError),
}

/// Serializes a database to its byte representation.
pub fn encode_db(db: &FeatureDb) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(VERSION);
    for n in db.scheme().as_u16s() {
        out.extend_from_slice(&n.to_le_bytes());
    }
    out.extend_from_slice(&(db.len() as u64).to_le_bytes());
    for record in db.records() {
        put_str(&mut out, &record.image_id);
        put_str(&mut out, &record.category);
        for &v in record.vector.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

/// Decodes and fully validates a byte representation. The checksum is
/// verified before any content is interpreted, so a truncated or corrupted
/// buffer never yields a partial database.
pub fn decode_db(bytes: &[u8]) -> Result<FeatureDb, DbFileError> {
    if bytes.len() < MAGIC.len() {
        return Err(DbFileError::Truncated { what: "magic", needed: MAGIC.len() - bytes.len() });
    }
    if &bytes[..MAGIC.len()] != MAGIC {
        return Err(DbFileError::BadMagic);
    }
    let after_magic = &bytes[MAGIC.len()..];
    if after_magic.len() < VERSION.len() {
        return Err(DbFileError::Truncated { what: "version", needed: VERSION.len() - after_magic.len() });
    }
    if &after_magic[..VERSION.len()] != VERSION {
        return Err(DbFileError::VersionMismatch {
            found: String::from_utf8_lossy(&after_magic[..VERSION.len()]).into_owned(),
            expected: String::from_utf8_lossy(VERSION).into_owned(),
        });
    }
    if bytes.len() < MAGIC.len() + VERSION.len() + 4 {
        return Err(DbFileError::Truncated { what: "checksum", needed: 4 });
    }
    let (payload, crc_bytes) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(crc_bytes.try_into().expect("split of 4"));
    let computed = crc32fast::hash(payload);
    if stored != computed {
        return Err(DbFileError::ChecksumMismatch { stored, computed });
    }

    let mut cursor = Cursor::new(&payload[MAGIC.len() + VERSION.len()..]);
    let n_h = cursor.u16("scheme")?;
    let n_s = cursor.u16("scheme")?;
    let n_v = cursor.u16("scheme")?;
    let n_q = cursor.u16("scheme")?;
    let scheme = QuantizationScheme::new(n_h, n_s, n_v, n_q)?;
    let count = cursor.u64("record count")?;
    let feature_len = scheme.feature_len();

    let mut records = Vec::new();
    for _ in 0..count {
        let image_id = cursor.string("image id")?;
        let category = cursor.string("category")?;
        let mut values = Vec::with_capacity(feature_len);
        for _ in 0..feature_len {
            values.push(cursor.f64("vector entry")?);
        }
        records.push(FeatureRecord {
            image_id,
            category,
            vector: FeatureVector::new(values, scheme)?,
        });
    }
    if !cursor.is_empty() {
        return Err(DbFileError::Malformed(format!(
            "{} trailing bytes after the last record",
            cursor.remaining()
        )));
    }
    Ok(FeatureDb::new(scheme, records)?)
}

pub fn save_db(db: &FeatureDb, path: &Path) -> Result<(), DbFileError> {
    std::fs::write(path, encode_db(db))
        .map_err(|e| DbFileError::Io { path: path.to_path_buf(), source: e })
}

pub fn load_db(path: &Path) -> Result<FeatureDb, DbFileError> {
    let bytes = std::fs::read(path)
        .map_err(|e| DbFileError::Io { path: path.to_path_buf(), source: e })?;
    decode_db(&bytes)
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

struct Cursor<'a> {
    bytes: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes }
    }

    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], DbFileError> {
        if self.bytes.len() < n {
            return Err(DbFileError::Truncated { what, needed: n - self.bytes.len() });
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, DbFileError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, DbFileError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64, DbFileError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self, what: &'static str) -> Result<f64, DbFileError> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }

    fn string(&mut self, what: &'static str) -> Result<String, DbFileError> {
        let len = self.u32(what)? as usize;
        let raw = self.take(len, what)?;
        String::from_utf8(raw.to_vec())
            .map_err(|_| DbFileError::Malformed(format!("{what} is not valid UTF-8")))
    }

    fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    fn remaining(&self) -> usize {
        self.bytes.len()
    }
}
