//! Decomposition of regular functions into compositions of a small
//! generator set: symmetric-group accumulators, bit-storage machines,
//! their reversals, character-wise maps, tuplefy, successor and unpad.

pub mod compo;
pub mod detharvest;
pub mod error;
pub mod json;
pub mod krohnrhodes;
pub mod machines;
pub mod perm;
pub mod reversal;
pub mod words;

pub use error::{Error, Result};
