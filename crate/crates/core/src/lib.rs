pub mod error;
pub mod motion;
pub mod netmodel;
pub mod pipeline;
pub mod prob;
pub mod pruning;
pub mod rng;
pub mod synthlab;
pub mod ttdist;

pub use error::{Error, Result};
