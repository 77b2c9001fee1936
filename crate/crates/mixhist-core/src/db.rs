//! In-memory feature database: one record per indexed image, all extracted
//! under a single quantization scheme. Immutable after construction and
//! safe to share read-only across query threads.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::descriptor::FeatureVector;
use crate::scheme::QuantizationScheme;

/// One row of a corpus manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub image_id: String,
    pub path: String,
    pub category: String,
}

/// One indexed image.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub image_id: String,
    pub category: String,
    pub vector: FeatureVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDb {
    scheme: QuantizationScheme,
    records: Vec<FeatureRecord>,
}

impl FeatureDb {
    /// Validates that image ids are unique and every vector was extracted
    /// under `scheme`. Record order is preserved.
    pub fn new(scheme: QuantizationScheme, records: Vec<FeatureRecord>) -> Result<Self, DbError> {
        let mut seen = BTreeMap::new();
        for (i, record) in records.iter().enumerate() {
            if record.vector.scheme() != &scheme {
                return Err(DbError::SchemeMismatch { image_id: record.image_id.clone() });
            }
            if let Some(_first) = seen.insert(record.image_id.as_str(), i) {
                return Err(DbError::DuplicateId { image_id: record.image_id.clone() });
            }
        }
        Ok(Self { scheme, records })
    }

    pub fn empty(scheme: QuantizationScheme) -> Self {
        Self { scheme, records: Vec::new() }
    }

    pub fn scheme(&self) -> &QuantizationScheme {
        &self.scheme
    }

    pub fn records(&self) -> &[FeatureRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, image_id: &str) -> Option<&FeatureRecord> {
        self.records.iter().find(|r| r.image_id == image_id)
    }

    /// Image id -> record position, for repeated lookups.
    pub fn id_index(&self) -> BTreeMap<&str, usize> {
        self.records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.image_id.as_str(), i))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DbError {
    DuplicateId { image_id: String },
    SchemeMismatch { image_id: String },
}

impl fmt::Display for DbError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DbError::DuplicateId { image_id } => write!(f, "duplicate image id {image_id:?}"),
            DbError::SchemeMismatch { image_id } => {
                write!(f, "record {image_id:?} was extracted under a different scheme")
            }
        }
    }
}

impl core::error::Error for DbError {}
