//! Circulant and Toeplitz Johnson–Lindenstrauss embeddings.
//!
//! `f(x) = M · (κ ⊙ x) / √k`, where `κ` is a random ±1 vector and `M` is the
//! first `k` rows of a random circulant (or a random `k × d` Toeplitz) matrix.
//! Only `2d` (or `2d + k - 1`) random numbers describe the map, and it is
//! applied in `O(d log d)` through FFT-based circular correlation.
//!
//! * [`transform`]: specification, seeded sampling and direct evaluation.
//! * [`fastconv`]: the FFT path.
//! * [`analysis`]: the `I + II` norm decomposition, tail-bound calculators and
//!   pairwise distortion reports.
//! * [`montecarlo`]: reproducible experiments checking the concentration
//!   behaviour empirically.

pub mod analysis;
pub mod error;
pub mod fastconv;
pub mod montecarlo;
pub mod points;
pub mod rng;
pub mod stats;
pub mod transform;

pub use error::{Error, Result};
pub use fastconv::{embed_fast, embed_pointset, FastEmbedder, SpectrumCache};
pub use points::PointSet;
pub use transform::{
    embed_naive, embed_raw_norm_sq, materialize_matrix, shift, target_dimension,
    CoefficientDistribution, MatrixStructure, SampledTransform, TransformRecord, TransformSpec,
};
