//! Classification of symmetric positive definite matrices by their distance
//! to convex class models on the SPD manifold.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, or `f32` with an `F32` suffix.

// `!(x > 0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod descriptors;
pub mod error;
pub mod linalg;
pub mod model;
pub mod optim;
pub mod scalar;
pub mod spd;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use model::{classify, geo_nn, MccmVariant};
pub use scalar::Scalar;

pub type Matrix = linalg::Mat<f64>;
pub type SymMatrix = spd::SymMatrix<f64>;
pub type SpdMatrix = spd::SpdMatrix<f64>;
pub type TangentFrame = spd::TangentFrame<f64>;
pub type SimplexWeights = optim::SimplexWeights<f64>;
pub type SpgParams = optim::SpgParams<f64>;
pub type MeanParams = stats::MeanParams<f64>;
pub type DistanceResult = model::DistanceResult<f64>;
pub type ConvexClassModel<L> = model::ConvexClassModel<f64, L>;

pub type MatrixF32 = linalg::Mat<f32>;
pub type SymMatrixF32 = spd::SymMatrix<f32>;
pub type SpdMatrixF32 = spd::SpdMatrix<f32>;
pub type TangentFrameF32 = spd::TangentFrame<f32>;
pub type SimplexWeightsF32 = optim::SimplexWeights<f32>;
pub type SpgParamsF32 = optim::SpgParams<f32>;
pub type MeanParamsF32 = stats::MeanParams<f32>;
pub type DistanceResultF32 = model::DistanceResult<f32>;
pub type ConvexClassModelF32<L> = model::ConvexClassModel<f32, L>;
