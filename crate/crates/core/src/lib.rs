//! Numerical toolkit for fractional maximal functions, local sharp maximal
//! functions, Orlicz gauges, weight conditions and fractional integral
//! operators on uniform grids in one and two dimensions.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod maximal;
pub mod oracle;
pub mod operators;
pub mod spaces;
pub mod weights;
pub mod young;

pub use error::{Error, Result};
