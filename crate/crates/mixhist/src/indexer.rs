//! Corpus indexing: decode every manifest image, extract its feature
//! vector, and assemble the database in manifest order.

use std::path::Path;

use mixhist_core::db::{DbError, FeatureDb, FeatureRecord, ManifestEntry};
use mixhist_core::descriptor::extract;
use mixhist_core::scheme::QuantizationScheme;
use rayon::prelude::*;
use thiserror::Error;

use crate::loader::{load_image, LoadError};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("image {image_id:?}: {source}")]
    Image {
        image_id: String,
        #[source]
        source: LoadError,
    },
    #[error(transparent)]
    Db(#[from] DbError),
}

/// Extracts one record per manifest entry, in manifest order. Extraction
/// runs in parallel across images; on failure the first failing entry in
/// manifest order is reported.
pub fn build_index(
    entries: &[ManifestEntry],
    scheme: &QuantizationScheme,
) -> Result<FeatureDb, IndexError> {
    let results: Vec<Result<FeatureRecord, IndexError>> = entries
        .par_iter()
        .map(|entry| {
            let img = load_image(Path::new(&entry.path)).map_err(|source| IndexError::Image {
                image_id: entry.image_id.clone(),
                source,
            })?;
            Ok(FeatureRecord {
                image_id: entry.image_id.clone(),
                category: entry.category.clone(),
                vector: extract(&img, scheme),
            })
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for result in results {
        records.push(result?);
    }
    Ok(FeatureDb::new(*scheme, records)?)
}
