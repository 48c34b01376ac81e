pub mod baselines;
pub mod cli;
pub mod error;
pub mod ftrl;
pub mod harness;
pub mod oracles;
pub mod problems;
pub mod regularizer;
pub mod suite;
pub mod vector;

pub use error::{Error, Result};
