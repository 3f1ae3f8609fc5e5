//! Rate, deployment and sleep-mode energy engine for load-proportional
//! multi-tier cellular networks modeled by Poisson point processes.

pub mod error;
pub mod geometry;
pub mod mgf;
pub mod montecarlo;
pub mod numerics;
pub mod optimizer;
pub mod power;
pub mod rate;
pub mod scenario;

pub use error::{Error, Result};
