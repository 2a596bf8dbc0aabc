//! Bit channel analysis: exact erasure-channel polarization, Gaussian
//! approximation density evolution, and mutual information of modulation
//! bit levels.

pub mod bec;
pub mod gaussian;
pub mod mutual_info;
pub mod quadrature;

pub use bec::{bec_polarize, bec_profile, variance_curve_bec, BecBitChannel};
pub use gaussian::{
    ga_capacity, ga_mean_from_capacity, ga_polarize, ga_profile, pe_from_mean, phi, phi_inv, q_function,
    GaussianBitChannel,
};
pub use mutual_info::{biawgn_capacity, cm_capacity, mc_bit_level_profile, quadrature_bit_level_profile};
pub use quadrature::GaussHermite;
