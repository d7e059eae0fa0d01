//! Simultaneous stabilization of a one-parameter family of SISO plants
//! through derivative-constrained analytic interpolation.

pub mod benchmarks;
pub mod cee;
pub mod cli;
pub mod error;
pub mod interp;
pub mod pipeline;
pub mod poly;
pub mod problem;
pub mod synth;

pub use error::{Error, Result};
