pub mod capillary;
pub mod cli;
pub mod cylinder;
pub mod error;
pub mod geometry;
pub mod spectrum_analytic;
pub mod spectrum_numeric;

pub use error::{Error, Result};
