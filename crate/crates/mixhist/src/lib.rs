//! Content-based image retrieval around the mix histogram descriptor:
//! image decoding, corpus manifests, the binary feature database, parallel
//! indexing and benchmarking, CSV reports, and a synthetic corpus
//! generator. The descriptor and metric mathematics live in
//! [`mixhist_core`].

pub mod dbfile;
pub mod harness;
pub mod indexer;
pub mod loader;
pub mod manifest;
pub mod report;
pub mod synth;

pub use mixhist_core as core;
