//! Shape descriptors for binary segmentation masks.
//!
//! Masks are decoded, cleaned up and split into 8-connected regions whose
//! boundaries feed three feature families: boundary signatures, scalar
//! geometric descriptors and polygonal approximations. The [`labels`] module
//! carries per-region class labels through NIfTI-1 volumes and
//! [`pipeline`] runs everything over folders.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which the batch pipeline uses.

// Negated comparisons deliberately treat NaN as failing the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod featuremap;
pub mod features;
pub mod geometric;
pub mod geometry;
pub mod labels;
pub mod pipeline;
pub mod polygonal;
pub mod raster;
pub mod render;
pub mod scalar;
pub mod signature;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Point2d = geometry::Point2<f64>;
pub type Point2f = geometry::Point2<f32>;
pub type Mbr = geometric::MbrResult<f64>;
pub type Geom = geometric::GeomFeatures<f64>;
pub type Signature = signature::ShapeSignature<f64>;
pub type SignatureStats = signature::SignatureStats<f64>;
pub type Boundary = signature::SampledBoundary<f64>;
pub type Approx = polygonal::PolyApprox<f64>;
pub type ApproxMetrics = polygonal::PolyMetrics<f64>;
pub type Features = features::RegionFeatures<f64>;
