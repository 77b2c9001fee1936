//! Distance metric and ranked retrieval.
//!
//! The metric is a Canberra-style sum of per-coordinate absolute
//! differences, each normalized by magnitude terms offset with the vector
//! means `u_T` and `u_Q`:
//!
//! * canonical mode: `sum_i |T_i - Q_i| / (|T_i + u_T| + |Q_i + u_Q|)` —
//!   symmetric, and never divides by zero on normalized histograms;
//! * literal mode: the denominator becomes `|T_i + u_T| + |Q_i - u_Q|`,
//!   which is asymmetric in its arguments; kept for comparison runs.
//!
//! In both modes a zero-denominator term contributes 0.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::db::FeatureDb;
use crate::descriptor::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricMode {
    #[default]
    Canonical,
    Literal,
}

impl fmt::Display for MetricMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricMode::Canonical => write!(f, "canonical"),
            MetricMode::Literal => write!(f, "literal"),
        }
    }
}

impl FromStr for MetricMode {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, QueryError> {
        match s {
            "canonical" => Ok(MetricMode::Canonical),
            "literal" => Ok(MetricMode::Literal),
            _ => Err(QueryError::UnknownMetric),
        }
    }
}

/// Distance between a stored vector `t` and a query vector `q` of equal
/// nonzero length. In literal mode the argument order matters: `t` is the
/// database side, `q` the query side.
pub fn distance_raw(t: &[f64], q: &[f64], mode: MetricMode) -> Result<f64, QueryError> {
    if t.len() != q.len() {
        return Err(QueryError::LengthMismatch { left: t.len(), right: q.len() });
    }
    if t.is_empty() {
        return Err(QueryError::EmptyVectors);
    }
    let m = t.len() as f64;
    let mut sum_t = 0.0;
    let mut sum_q = 0.0;
    for i in 0..t.len() {
        sum_t += t[i];
        sum_q += q[i];
    }
    let u_t = sum_t / m;
    let u_q = sum_q / m;

    let mut total = 0.0;
    for i in 0..t.len() {
        let numerator = libm::fabs(t[i] - q[i]);
        let denominator = match mode {
            MetricMode::Canonical => libm::fabs(t[i] + u_t) + libm::fabs(q[i] + u_q),
            MetricMode::Literal => libm::fabs(t[i] + u_t) + libm::fabs(q[i] - u_q),
        };
        if denominator != 0.0 {
            total += numerator / denominator;
        }
    }
    Ok(total)
}

/// [`distance_raw`] with scheme checking.
pub fn distance(t: &FeatureVector, q: &FeatureVector, mode: MetricMode) -> Result<f64, QueryError> {
    if t.scheme() != q.scheme() {
        return Err(QueryError::SchemeMismatch);
    }
    distance_raw(t.values(), q.values(), mode)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub image_id: String,
    pub distance: f64,
}

/// Query result: entries sorted by ascending distance, ties broken by
/// ascending image id. Records which metric mode produced the distances.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedResult {
    metric_mode: MetricMode,
    entries: Vec<RankedEntry>,
}

impl RankedResult {
    pub fn metric_mode(&self) -> MetricMode {
        self.metric_mode
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Top-`n` records by ascending distance to `query`, over a full linear
/// scan of the database. Returns fewer than `n` entries only when the
/// database is smaller. A record identical to the query ranks first with
/// distance 0; nothing is excluded.
pub fn rank(
    db: &FeatureDb,
    query: &FeatureVector,
    n: usize,
    mode: MetricMode,
) -> Result<RankedResult, QueryError> {
    if n == 0 {
        return Err(QueryError::ZeroCount);
    }
    if query.scheme() != db.scheme() {
        return Err(QueryError::SchemeMismatch);
    }
    let mut scored = Vec::with_capacity(db.len());
    for record in db.records() {
        let d = distance_raw(record.vector.values(), query.values(), mode)?;
        scored.push((record, d));
    }
    scored.sort_unstable_by(|a, b| {
        a.1.total_cmp(&b.1).then_with(|| a.0.image_id.cmp(&b.0.image_id))
    });
    scored.truncate(n);
    Ok(RankedResult {
        metric_mode: mode,
        entries: scored
            .into_iter()
            .map(|(record, d)| RankedEntry { image_id: record.image_id.clone(), distance: d })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryError {
    LengthMismatch { left: usize, right: usize },
    EmptyVectors,
    SchemeMismatch,
    ZeroCount,
    UnknownMetric,
}

impl fmt::Display for QueryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryError::LengthMismatch { left, right } => {
                write!(f, "vector lengths differ ({left} vs {right})")
            }
            QueryError::EmptyVectors => write!(f, "vectors must be nonempty"),
            QueryError::SchemeMismatch => write!(f, "quantization schemes differ"),
            QueryError::ZeroCount => write!(f, "result count must be at least 1"),
            QueryError::UnknownMetric => write!(f, "metric mode must be canonical or literal"),
        }
    }
}

impl core::error::Error for QueryError {}
