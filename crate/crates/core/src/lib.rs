//! Chernoff divergences and minimum-error discrimination for convex sets of
//! quantum states.

pub mod discrimination;
pub mod error;
pub mod linalg;
pub mod sdp;
pub mod sets;
pub mod states;

#[cfg(test)]
pub(crate) mod test_rng;

pub use error::{Error, Result};
