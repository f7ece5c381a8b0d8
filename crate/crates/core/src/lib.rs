//! Stochastic six vertex model under weak asymmetry: a sequential sampler,
//! exact discrete identities, the telegraph-equation profile and the
//! Gaussian fluctuation predictions they are compared against.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod config;
pub mod error;
pub mod exact;
pub mod fluctuation;
pub mod harness;
pub mod io;
pub mod kernels;
pub mod lattice;
pub mod noise;
pub mod params;
pub mod rng;
pub mod stats;
pub mod telegraph;

pub use boundary::{BoundaryCondition, BoundarySpec};
pub use error::{Error, Result};
pub use exact::{enumerate_exact, ExactLaw};
pub use lattice::{
    sample_configuration, sample_replica, AxisProfile, HeightConvention, LatticeSample, VertexCase, VertexType,
};
pub use params::ModelParams;
