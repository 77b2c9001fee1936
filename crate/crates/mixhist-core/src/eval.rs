//! Retrieval evaluation: seeded query sampling, precision/recall at N, the
//! whole-corpus benchmark, and precision-recall curve points.
//!
//! For a query of category C, `I_N` is the number of the first N results
//! sharing C (the query itself counts when retrieved), `M` the total number
//! of C images in the database; precision is `I_N / N` and recall
//! `I_N / M`. Reported figures are arithmetic means over all queries.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::db::{FeatureDb, ManifestEntry};
use crate::query::{rank, MetricMode, QueryError, RankedResult};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    /// How many results each query retrieves (the benchmark's N).
    pub n_retrieved: usize,
    /// How many query images to draw from each category.
    pub queries_per_category: usize,
    pub rng_seed: u64,
    pub metric_mode: MetricMode,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            n_retrieved: 12,
            queries_per_category: 20,
            rng_seed: 42,
            metric_mode: MetricMode::Canonical,
        }
    }
}

impl EvalConfig {
    fn validate(&self) -> Result<(), EvalError> {
        if self.n_retrieved == 0 {
            return Err(EvalError::BadConfig("n_retrieved must be at least 1"));
        }
        if self.queries_per_category == 0 {
            return Err(EvalError::BadConfig("queries_per_category must be at least 1"));
        }
        Ok(())
    }
}

/// Precision and recall of a single query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryEval {
    pub image_id: String,
    pub precision: f64,
    pub recall: f64,
}

/// Benchmark output: per-query detail plus arithmetic means, with the
/// configuration echoed for provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub per_query: Vec<QueryEval>,
    pub config: EvalConfig,
}

/// Draws `per_category` image ids uniformly without replacement from every
/// category, in the order categories first appear in the manifest.
///
/// The generator is the crate's frozen SplitMix64 stream ([`crate::rng`]):
/// within each category the ids are partially Fisher-Yates shuffled in
/// manifest order and the prefix taken, so the same seed and manifest
/// always produce the same sample.
pub fn sample_queries(
    entries: &[ManifestEntry],
    per_category: usize,
    seed: u64,
) -> Result<Vec<String>, EvalError> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for entry in entries {
        let group = groups.entry(entry.category.as_str()).or_insert_with(|| {
            order.push(entry.category.as_str());
            Vec::new()
        });
        group.push(entry.image_id.as_str());
    }
    for category in &order {
        let ids = &groups[category];
        if ids.len() < per_category {
            return Err(EvalError::CategoryTooSmall {
                category: String::from(*category),
                available: ids.len(),
                requested: per_category,
            });
        }
    }
    let mut rng = SplitMix64::new(seed);
    let mut sample = Vec::with_capacity(order.len() * per_category);
    for category in &order {
        let mut ids = groups[category].clone();
        rng.partial_shuffle(&mut ids, per_category);
        sample.extend(ids[..per_category].iter().map(|id| String::from(*id)));
    }
    Ok(sample)
}

/// Category lookup tables for a database: id -> category and per-category
/// record counts (the M of recall).
#[derive(Debug, Clone)]
pub struct CategoryIndex<'a> {
    by_id: BTreeMap<&'a str, &'a str>,
    counts: BTreeMap<&'a str, usize>,
}

impl<'a> CategoryIndex<'a> {
    pub fn from_db(db: &'a FeatureDb) -> Self {
        let mut by_id = BTreeMap::new();
        let mut counts = BTreeMap::new();
        for record in db.records() {
            by_id.insert(record.image_id.as_str(), record.category.as_str());
            *counts.entry(record.category.as_str()).or_insert(0) += 1;
        }
        Self { by_id, counts }
    }

    pub fn category_of(&self, image_id: &str) -> Option<&'a str> {
        self.by_id.get(image_id).copied()
    }

    pub fn count(&self, category: &str) -> usize {
        self.counts.get(category).copied().unwrap_or(0)
    }
}

/// Precision and recall of one ranked result at cutoff `n`, against a
/// prebuilt [`CategoryIndex`].
pub fn precision_recall_with(
    result: &RankedResult,
    query_category: &str,
    index: &CategoryIndex<'_>,
    n: usize,
) -> Result<(f64, f64), EvalError> {
    let m = index.count(query_category);
    if m == 0 {
        return Err(EvalError::UnknownCategory(String::from(query_category)));
    }
    let relevant = result
        .entries()
        .iter()
        .take(n)
        .filter(|e| index.category_of(&e.image_id) == Some(query_category))
        .count();
    Ok((relevant as f64 / n as f64, relevant as f64 / m as f64))
}

/// Convenience form of [`precision_recall_with`] that builds the category
/// index from the database on the fly.
pub fn precision_recall_at(
    result: &RankedResult,
    query_category: &str,
    db: &FeatureDb,
    n: usize,
) -> Result<(f64, f64), EvalError> {
    precision_recall_with(result, query_category, &CategoryIndex::from_db(db), n)
}

/// Evaluates one query image already present in the database: ranks its
/// stored vector against the whole database and scores the prefix.
pub fn evaluate_query(
    db: &FeatureDb,
    index: &CategoryIndex<'_>,
    positions: &BTreeMap<&str, usize>,
    query_id: &str,
    n: usize,
    mode: MetricMode,
) -> Result<QueryEval, EvalError> {
    let &pos = positions
        .get(query_id)
        .ok_or_else(|| EvalError::UnknownQueryId(String::from(query_id)))?;
    let record = &db.records()[pos];
    let result = rank(db, &record.vector, n, mode)?;
    let (precision, recall) = precision_recall_with(&result, &record.category, index, n)?;
    Ok(QueryEval { image_id: String::from(query_id), precision, recall })
}

/// Arithmetic mean precision and recall over per-query rows; (0, 0) when
/// there are none.
pub fn summarize(per_query: &[QueryEval]) -> (f64, f64) {
    if per_query.is_empty() {
        return (0.0, 0.0);
    }
    let n = per_query.len() as f64;
    let p: f64 = per_query.iter().map(|q| q.precision).sum();
    let r: f64 = per_query.iter().map(|q| q.recall).sum();
    (p / n, r / n)
}

/// Full benchmark: sample queries per category, rank each against the
/// whole database, report per-query precision/recall and their means.
pub fn run_benchmark(
    db: &FeatureDb,
    entries: &[ManifestEntry],
    config: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    config.validate()?;
    let ids = sample_queries(entries, config.queries_per_category, config.rng_seed)?;
    let index = CategoryIndex::from_db(db);
    let positions = db.id_index();
    let per_query = ids
        .iter()
        .map(|id| {
            evaluate_query(db, &index, &positions, id, config.n_retrieved, config.metric_mode)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (mean_precision, mean_recall) = summarize(&per_query);
    Ok(EvalReport { mean_precision, mean_recall, per_query, config: *config })
}

/// One precision-recall curve point.
#[derive(Debug, Clone, PartialEq)]
pub struct PrPoint {
    pub n: usize,
    pub mean_recall: f64,
    pub mean_precision: f64,
}

/// Benchmarks at every cutoff in `n_values` (which must be nonempty and
/// strictly ascending). Each query is ranked once at the largest cutoff
/// and the smaller cutoffs scored on prefixes, which is exactly equivalent
/// to running one benchmark per cutoff.
pub fn pr_curve(
    db: &FeatureDb,
    entries: &[ManifestEntry],
    config: &EvalConfig,
    n_values: &[usize],
) -> Result<Vec<PrPoint>, EvalError> {
    config.validate()?;
    if n_values.is_empty() {
        return Err(EvalError::BadCurveCutoffs("cutoff list must be nonempty"));
    }
    if n_values[0] == 0 {
        return Err(EvalError::BadCurveCutoffs("cutoffs must be at least 1"));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::BadCurveCutoffs("cutoffs must be strictly ascending"));
    }
    let ids = sample_queries(entries, config.queries_per_category, config.rng_seed)?;
    let index = CategoryIndex::from_db(db);
    let positions = db.id_index();
    let n_max = *n_values.last().expect("nonempty");

    let mut precision_sums = alloc::vec![0.0f64; n_values.len()];
    let mut recall_sums = alloc::vec![0.0f64; n_values.len()];
    for id in &ids {
        let &pos = positions
            .get(id.as_str())
            .ok_or_else(|| EvalError::UnknownQueryId(String::from(id)))?;
        let record = &db.records()[pos];
        let result = rank(db, &record.vector, n_max, config.metric_mode)?;
        let m = index.count(&record.category);
        if m == 0 {
            return Err(EvalError::UnknownCategory(record.category.clone()));
        }
        let mut relevant = 0usize;
        let mut taken = 0usize;
        for (slot, &n) in n_values.iter().enumerate() {
            while taken < n.min(result.len()) {
                if index.category_of(&result.entries()[taken].image_id) == Some(record.category.as_str()) {
                    relevant += 1;
                }
                taken += 1;
            }
            precision_sums[slot] += relevant as f64 / n as f64;
            recall_sums[slot] += relevant as f64 / m as f64;
        }
    }
    let count = if ids.is_empty() { 1.0 } else { ids.len() as f64 };
    Ok(n_values
        .iter()
        .enumerate()
        .map(|(slot, &n)| PrPoint {
            n,
            mean_recall: recall_sums[slot] / count,
            mean_precision: precision_sums[slot] / count,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    CategoryTooSmall { category: String, available: usize, requested: usize },
    UnknownCategory(String),
    UnknownQueryId(String),
    BadConfig(&'static str),
    BadCurveCutoffs(&'static str),
    Query(QueryError),
}

impl From<QueryError> for EvalError {
    fn from(e: QueryError) -> Self {
        EvalError::Query(e)
    }
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::CategoryTooSmall { category, available, requested } => write!(
                f,
                "category {category:?} has {available} images, cannot sample {requested}"
            ),
            EvalError::UnknownCategory(c) => write!(f, "category {c:?} not present in database"),
            EvalError::UnknownQueryId(id) => write!(f, "query id {id:?} not present in database"),
            EvalError::BadConfig(msg) | EvalError::BadCurveCutoffs(msg) => write!(f, "{msg}"),
            EvalError::Query(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for EvalError {}
