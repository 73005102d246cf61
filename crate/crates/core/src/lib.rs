pub mod bandlimit;
pub mod cli;
pub mod coeffs;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod hankel;
pub mod kernels;
pub mod network;
pub mod quad;
pub mod rbf;
pub mod report;
pub mod specfun;
pub mod stability;

pub use error::{Error, Result};
