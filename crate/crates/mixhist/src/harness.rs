//! Benchmark orchestration: parallel query evaluation and the quantization
//! sweep over (orientation bins x color presets).

use mixhist_core::db::{FeatureDb, ManifestEntry};
use mixhist_core::eval::{
    evaluate_query, sample_queries, summarize, CategoryIndex, EvalConfig, EvalError, EvalReport,
};
use mixhist_core::scheme::{color_preset, QuantizationScheme};
use rayon::prelude::*;
use thiserror::Error;

use crate::indexer::{build_index, IndexError};

/// Drop-in parallel version of [`mixhist_core::eval::run_benchmark`]:
/// queries are evaluated across threads but assembled in sample order, so
/// the report is identical to the serial one.
pub fn run_benchmark_parallel(
    db: &FeatureDb,
    entries: &[ManifestEntry],
    config: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    if config.n_retrieved == 0 {
        return Err(EvalError::BadConfig("n_retrieved must be at least 1"));
    }
    if config.queries_per_category == 0 {
        return Err(EvalError::BadConfig("queries_per_category must be at least 1"));
    }
    let ids = sample_queries(entries, config.queries_per_category, config.rng_seed)?;
    let index = CategoryIndex::from_db(db);
    let positions = db.id_index();
    let per_query = ids
        .par_iter()
        .map(|id| {
            evaluate_query(db, &index, &positions, id, config.n_retrieved, config.metric_mode)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (mean_precision, mean_recall) = summarize(&per_query);
    Ok(EvalReport { mean_precision, mean_recall, per_query, config: *config })
}

/// Mean-precision grid over every (n_q, color preset) pair, evaluated with
/// one shared query sample (same seed, same manifest for every cell).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub nq_values: Vec<u16>,
    pub nc_values: Vec<u32>,
    /// `cells[i][j]` is the mean precision for `nq_values[i]` x `nc_values[j]`.
    pub cells: Vec<Vec<f64>>,
}

impl SweepGrid {
    /// Coordinates and value of the best cell (first occurrence wins ties).
    pub fn best(&self) -> Option<(u16, u32, f64)> {
        let mut best: Option<(u16, u32, f64)> = None;
        for (i, row) in self.cells.iter().enumerate() {
            for (j, &value) in row.iter().enumerate() {
                if best.map_or(true, |(_, _, b)| value > b) {
                    best = Some((self.nq_values[i], self.nc_values[j], value));
                }
            }
        }
        best
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("no named factorization for {0} colors (known: 72, 90, 160, 240)")]
    UnknownPreset(u32),
    #[error("sweep needs at least one orientation count and one color preset")]
    EmptyAxis,
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Builds one index per grid cell and benchmarks it. Cells stream one at a
/// time (a whole-corpus index per cell); extraction inside `build_index`
/// and queries inside the benchmark are parallel.
pub fn sweep(
    entries: &[ManifestEntry],
    nq_values: &[u16],
    nc_values: &[u32],
    config: &EvalConfig,
) -> Result<SweepGrid, SweepError> {
    if nq_values.is_empty() || nc_values.is_empty() {
        return Err(SweepError::EmptyAxis);
    }
    let mut presets = Vec::with_capacity(nc_values.len());
    for &nc in nc_values {
        presets.push(color_preset(nc).ok_or(SweepError::UnknownPreset(nc))?);
    }
    let mut cells = Vec::with_capacity(nq_values.len());
    for &nq in nq_values {
        let mut row = Vec::with_capacity(nc_values.len());
        for &(n_h, n_s, n_v) in &presets {
            let scheme = QuantizationScheme::new(n_h, n_s, n_v, nq)
                .expect("presets and nq are validated nonzero");
            let db = build_index(entries, &scheme)?;
            let report = run_benchmark_parallel(&db, entries, config)?;
            row.push(report.mean_precision);
        }
        cells.push(row);
    }
    Ok(SweepGrid {
        nq_values: nq_values.to_vec(),
        nc_values: nc_values.to_vec(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use mixhist_core::descriptor::FeatureVector;
    use mixhist_core::db::FeatureRecord;
    use mixhist_core::eval::run_benchmark;
    use mixhist_core::query::MetricMode;

    fn one_hot_db(categories: usize, per_category: usize) -> (FeatureDb, Vec<ManifestEntry>) {
        let scheme = QuantizationScheme::new(categories as u16, 1, 1, 1).unwrap();
        let mut records = Vec::new();
        let mut entries = Vec::new();
        for c in 0..categories {
            let mut values = vec![0.0; categories];
            values[c] = 1.0;
            for i in 0..per_category {
                let id = format!("c{c}i{i:02}");
                let cat = format!("cat{c}");
                records.push(FeatureRecord {
                    image_id: id.clone(),
                    category: cat.clone(),
                    vector: FeatureVector::new(values.clone(), scheme).unwrap(),
                });
                entries.push(ManifestEntry { image_id: id, path: format!("{c}/{i}.png"), category: cat });
            }
        }
        (FeatureDb::new(scheme, records).unwrap(), entries)
    }

    #[test]
    fn parallel_benchmark_equals_serial() {
        let (db, entries) = one_hot_db(5, 14);
        let config = EvalConfig {
            n_retrieved: 9,
            queries_per_category: 6,
            rng_seed: 31,
            metric_mode: MetricMode::Canonical,
        };
        let serial = run_benchmark(&db, &entries, &config).unwrap();
        let parallel = run_benchmark_parallel(&db, &entries, &config).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn unknown_preset_rejected() {
        let config = EvalConfig::default();
        let err = sweep(&[], &[4], &[100], &config).unwrap_err();
        assert!(matches!(err, SweepError::UnknownPreset(100)));
    }

    #[test]
    fn best_cell_picks_the_maximum() {
        let grid = SweepGrid {
            nq_values: vec![3, 4],
            nc_values: vec![72, 160],
            cells: vec![vec![0.2, 0.4], vec![0.3, 0.9]],
        };
        assert_eq!(grid.best(), Some((4, 160, 0.9)));
    }
}
