//! Balanced block partitions and low-spread transversals of set sequences.

pub mod blocks;
pub mod construct2d;
pub mod error;
mod extf64;
pub mod geom2d;
pub mod optimize2d;
pub mod sets1d;
pub mod transversal1d;

pub use error::{Error, Result};
