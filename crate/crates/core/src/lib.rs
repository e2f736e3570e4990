//! Score-based explanations for query answers and classifier outputs.
pub mod classify;
pub mod cli;
pub mod dbscores;
pub mod error;
pub mod games;
pub mod mlscores;
pub mod rational;
pub mod reldb;
pub(crate) mod serde_rational;
mod text;

pub use error::{Error, Result};
