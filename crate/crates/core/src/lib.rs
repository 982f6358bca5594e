//! Detects, classifies, and reports GUI design violations between a
//! mobile-app screen mock-up and its implementation, and synthesizes
//! evaluation corpora with injected violations to measure its own
//! detection and classification quality.
//!
//! Pipeline: [`ingest`] parses the mock-up spec bundle and the runtime
//! hierarchy dump into [`model::Screen`] values; [`matching`] pairs up
//! leaf components by box similarity; [`vision`] supplies the perceptual
//! diff, binarization, and color-histogram kernels; [`detect`] turns all
//! of that into classified [`model::DesignViolation`]s; [`report`] writes
//! the HTML and machine-readable bundles; [`inject`] builds synthetic
//! corpora and [`eval`] scores detector output against their manifests.

pub mod detect;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod inject;
pub mod matching;
pub mod model;
pub mod raster;
pub mod report;
pub mod vision;

pub use error::{Error, Result};
