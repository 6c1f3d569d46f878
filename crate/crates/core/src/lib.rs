//! Matrix-variate skew distributions — generalized hyperbolic, variance-gamma,
//! and normal inverse Gaussian — built as matrix normal variance-mean mixtures:
//! log-densities, exact samplers, moment generating functions, and the ECM
//! maximum-likelihood fitter with Aitken-accelerated stopping.

pub mod ecm;
pub mod error;
pub mod matnorm;
pub mod matrixdist;
pub mod mixing;
pub mod parallel;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};
pub use matnorm::{MatrixParamSet, ScaleFactors};
pub use matrixdist::{MatrixSkewModel, MixingLaw};
