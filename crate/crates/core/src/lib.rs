//! One-layer denoising autoencoders trained with randomized stochastic
//! gradients, plus the distributed sub-network scheme.
//!
//! [`da`] holds the model and exact expectation oracles, [`rsg`] the optimizer
//! and its bounds, and [`dda`] the distributed planner and executor.

pub mod da;
pub mod dataset;
pub mod dda;
pub mod error;
pub mod objective;
pub mod rng;
pub mod rsg;

pub use error::{Error, Result};
