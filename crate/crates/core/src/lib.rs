//! Formal loop-group factorization, soliton hierarchies, tau functions and
//! Virasoro actions at truncated-series precision.

pub mod catalog;
pub mod dump;
pub mod error;
pub mod hierarchy;
pub mod jet;
pub mod matrix;
pub mod runner;
pub mod scalar;
pub mod scattering;
pub mod scenario;
pub mod series;
pub mod splitting;
pub mod tau;
pub mod virasoro;

pub use error::{Error, Result};
