//! Structured-scene benchmarks for text-to-image alignment: prompt
//! generation, detection post-processing, matching-based scoring, paired
//! prompt revision, guidance composition and result statistics.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the file formats carry.

pub mod detect;
pub mod error;
pub mod gen;
pub mod guidance;
pub mod revise;
pub mod scalar;
pub mod scene;
pub mod score;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type BoundingBox = detect::BoundingBox<f64>;
pub type RawDetection = detect::RawDetection<f64>;
pub type DetectedInstance = detect::DetectedInstance<f64>;
pub type DetectionSet = detect::DetectionSet<f64>;
pub type PostProcessConfig = detect::PostProcessConfig<f64>;
pub type Aggregate = score::Aggregate<f64>;
pub type GuidanceSpec = guidance::GuidanceSpec<f64>;
pub type ToyDenoiser = guidance::ToyDenoiser<f64>;
pub type Moments = stats::Moments<f64>;
