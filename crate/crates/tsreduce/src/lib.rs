//! Timestamp selection for time-series dimensionality reduction.
//!
//! This crate reduces labeled time-series datasets by keeping a small set
//! of shared timestamps chosen by nature-inspired optimizers, instead of
//! averaging segments. The projection distance on the kept timestamps
//! lower-bounds the full Euclidean distance, so reduced-space mining never
//! produces false dismissals. Averaging (PAA) and symbolic (SAX) baselines
//! with their own lower-bounding distances are included for comparison,
//! along with 1NN classification, k-means clustering, and a batch
//! experiment harness.

pub mod dataset;
pub mod distance;
pub mod error;
pub mod harness;
pub mod mining;
pub mod optimize;
pub mod representation;
pub mod synth;

pub use error::{Error, Result};

/// The user guide, compiled with the crate so every example stays honest.
/// Each module mirrors one chapter of the book under `book/src`; the code
/// blocks run as documentation tests.
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/datasets.md")]
    pub mod datasets {}
    #[doc = include_str!("../../../book/src/representations.md")]
    pub mod representations {}
    #[doc = include_str!("../../../book/src/lower-bounds.md")]
    pub mod lower_bounds {}
    #[doc = include_str!("../../../book/src/mining.md")]
    pub mod mining {}
    #[doc = include_str!("../../../book/src/optimizers.md")]
    pub mod optimizers {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
}
