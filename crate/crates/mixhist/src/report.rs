//! CSV emission for evaluation outputs. All output is UTF-8, comma
//! separated, header row first; floats use Rust's shortest round-trip
//! formatting so identical runs emit identical bytes.

use mixhist_core::db::FeatureDb;
use mixhist_core::eval::{EvalReport, PrPoint};
use mixhist_core::query::RankedResult;

use crate::harness::SweepGrid;

/// Per-query rows plus a final `mean` summary row.
pub fn eval_report_csv(report: &EvalReport) -> String {
    let mut out = String::from("image_id,precision,recall\n");
    for row in &report.per_query {
        out.push_str(&format!("{},{},{}\n", row.image_id, row.precision, row.recall));
    }
    out.push_str(&format!("mean,{},{}\n", report.mean_precision, report.mean_recall));
    out
}

/// Human-readable benchmark summary with the configuration echoed.
pub fn eval_report_text(report: &EvalReport) -> String {
    format!(
        "precision={} recall={} (queries={}, n={}, per_category={}, seed={}, metric={})",
        report.mean_precision,
        report.mean_recall,
        report.per_query.len(),
        report.config.n_retrieved,
        report.config.queries_per_category,
        report.config.rng_seed,
        report.config.metric_mode,
    )
}

/// Curve points as `n,recall,precision` rows.
pub fn pr_curve_csv(points: &[PrPoint]) -> String {
    let mut out = String::from("n,recall,precision\n");
    for point in points {
        out.push_str(&format!("{},{},{}\n", point.n, point.mean_recall, point.mean_precision));
    }
    out
}

/// Grid rows: header of color counts, one row per orientation count.
pub fn sweep_csv(grid: &SweepGrid) -> String {
    let mut out = String::from("nq");
    for nc in &grid.nc_values {
        out.push_str(&format!(",{nc}"));
    }
    out.push('\n');
    for (i, row) in grid.cells.iter().enumerate() {
        out.push_str(&format!("{}", grid.nq_values[i]));
        for value in row {
            out.push_str(&format!(",{value}"));
        }
        out.push('\n');
    }
    out
}

/// Ranked query results as `rank,image_id,category,distance` rows; the
/// category is looked up in the database (empty if unknown).
pub fn ranked_csv(result: &RankedResult, db: &FeatureDb) -> String {
    let index = db.id_index();
    let mut out = String::from("rank,image_id,category,distance\n");
    for (i, entry) in result.entries().iter().enumerate() {
        let category = index
            .get(entry.image_id.as_str())
            .map(|&pos| db.records()[pos].category.as_str())
            .unwrap_or("");
        out.push_str(&format!("{},{},{},{}\n", i + 1, entry.image_id, category, entry.distance));
    }
    out
}
