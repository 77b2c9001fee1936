//! Corpus manifests: UTF-8 CSV with header `image_id,path,category`.
//!
//! Relative image paths are resolved against the manifest's directory, so
//! a corpus directory can be moved as a unit.

use std::collections::HashSet;
use std::io;
use std::path::{Path, PathBuf};

use mixhist_core::db::ManifestEntry;
use thiserror::Error;

pub const HEADER: [&str; 3] = ["image_id", "path", "category"];

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest not found: {0}")]
    Missing(PathBuf),
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("bad manifest header {found:?}; expected image_id,path,category")]
    BadHeader { found: String },
    #[error("manifest line {line}: expected 3 fields, found {fields}")]
    MalformedRow { line: u64, fields: usize },
    #[error("manifest line {line}: {source}")]
    Csv {
        line: u64,
        #[source]
        source: csv::Error,
    },
    #[error("manifest line {line}: duplicate image id {image_id:?}")]
    DuplicateId { image_id: String, line: u64 },
    #[error("manifest line {line}: empty {field}")]
    EmptyField { line: u64, field: &'static str },
}

/// Parses a manifest, preserving file order and rejecting duplicate ids.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, ManifestError> {
    let raw = std::fs::read(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            ManifestError::Missing(path.to_path_buf())
        } else {
            ManifestError::Io { path: path.to_path_buf(), source: e }
        }
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(raw.as_slice());
    let headers = reader
        .headers()
        .map_err(|e| ManifestError::Csv { line: 1, source: e })?;
    if headers != &csv::StringRecord::from(HEADER.to_vec()) {
        return Err(ManifestError::BadHeader { found: headers.iter().collect::<Vec<_>>().join(",") });
    }

    let mut entries = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (i, record) in reader.records().enumerate() {
        let line = i as u64 + 2;
        let record = record.map_err(|e| ManifestError::Csv { line, source: e })?;
        if record.len() != 3 {
            return Err(ManifestError::MalformedRow { line, fields: record.len() });
        }
        let image_id = record[0].to_string();
        let raw_path = record[1].to_string();
        let category = record[2].to_string();
        if image_id.is_empty() {
            return Err(ManifestError::EmptyField { line, field: "image_id" });
        }
        if raw_path.is_empty() {
            return Err(ManifestError::EmptyField { line, field: "path" });
        }
        if !seen.insert(image_id.clone()) {
            return Err(ManifestError::DuplicateId { image_id, line });
        }
        let resolved = if Path::new(&raw_path).is_absolute() {
            raw_path
        } else {
            base.join(&raw_path).to_string_lossy().into_owned()
        };
        entries.push(ManifestEntry { image_id, path: resolved, category });
    }
    Ok(entries)
}

/// Writes a manifest with the exact `image_id,path,category` header. Paths
/// are written as given (callers emit paths relative to the manifest).
pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> io::Result<()> {
    let mut out = String::from("image_id,path,category\n");
    for entry in entries {
        out.push_str(&format!("{},{},{}\n", entry.image_id, entry.path, entry.category));
    }
    std::fs::write(path, out)
}
