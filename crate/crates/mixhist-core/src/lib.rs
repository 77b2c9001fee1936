//! Core engine for content-based image retrieval with the mix histogram
//! descriptor: a joint probability table over (edge-orientation bin, color
//! bin) pairs, extracted from HSV planes via a multi-channel structure
//! tensor.
//!
//! This crate is `no_std` + `alloc`: it contains the descriptor math, the
//! distance metric, ranked search, and the precision/recall evaluation
//! arithmetic. File formats, image decoding, and the CLI live in the
//! companion `mixhist` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod db;
pub mod descriptor;
pub mod eval;
pub mod gradient;
pub mod image;
pub mod query;
pub mod rng;
pub mod scheme;

pub use db::{FeatureDb, FeatureRecord, ManifestEntry};
pub use descriptor::{extract, DescriptorBasis, FeatureVector, MixHistogram};
pub use eval::{EvalConfig, EvalReport, QueryEval};
pub use image::{HsvImage, Plane, RgbImage};
pub use query::{distance, rank, MetricMode, RankedResult};
pub use scheme::QuantizationScheme;
