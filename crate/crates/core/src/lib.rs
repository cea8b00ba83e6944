//! Recovery of the initial source of a diffusion-logistic equation from
//! integral-type time series, by minimizing a Tikhonov-regularized misfit
//! with a tensor-train global optimizer.

pub mod error;
pub mod experiments;
pub mod forward;
pub mod model;
pub mod observation;
pub mod spline;
pub mod tikhonov;
pub mod ttopt;

pub use error::{Error, Result};
