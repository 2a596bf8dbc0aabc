//! Polar codes and multilevel polar-coded ASK modulation.
//!
//! Binary polar coding and multilevel coding are both treated as sequential
//! binary partitions of a channel into ordered bit channels. The crate
//! provides:
//!
//! * [`channels`]: unit-energy ASK, AWGN and erasure channels.
//! * [`sbp`]: labelings, capacity profiles and their mean/variance, product
//!   partition bookkeeping.
//! * [`polar`]: encoder, successive cancellation decoder, frozen-set choice.
//! * [`analysis`]: exact erasure recursion, Gaussian-approximation density
//!   evolution, bit level mutual information.
//! * [`mlc`]: multilevel polar codes with multistage decoding.
//! * [`harness`]: Monte-Carlo simulation and figure data generation.
//!
//! Numerical code is generic over [`Real`] (`f32`/`f64`); exact recursions are
//! generic over [`Scalar`] and also run on [`Rational`].

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channels;
pub mod demap;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod mlc;
pub mod polar;
pub mod sbp;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

/// Arbitrary-precision rational, for exact erasure-channel analysis.
pub type Rational = num_rational::BigRational;

pub type Constellation64 = channels::Constellation<f64>;
pub type Constellation32 = channels::Constellation<f32>;
pub type AwgnChannel64 = channels::AwgnChannel<f64>;
pub type BecChannel64 = channels::BecChannel<f64>;
pub type CapacityProfile64 = sbp::CapacityProfile<f64>;
pub type ExactProfile = sbp::CapacityProfile<Rational>;
pub type GaussianBitChannel64 = analysis::GaussianBitChannel<f64>;
pub type ScDecoder64 = polar::ScDecoder<f64>;
pub type ScDecoder32 = polar::ScDecoder<f32>;
pub type MultilevelPolarCode64 = mlc::MultilevelPolarCode<f64>;
pub type MlcDesign64 = mlc::MlcDesign<f64>;
