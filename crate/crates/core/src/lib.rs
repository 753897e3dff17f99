//! Sign-instrument (Cauchy) inference for predictive regressions.

pub mod dgp;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod inference;
pub mod io;
pub mod sample;
pub mod stats;

pub use error::{Error, Result};
pub use sample::RegressionSample;
