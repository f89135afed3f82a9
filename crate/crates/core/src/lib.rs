//! Definable sets and definable bijections of modules over semisimple rings,
//! with their dimension, K₀ and K₁ invariants.

pub mod error;
pub mod rings;

pub use error::{Error, Result};
pub mod modules;
pub mod ppsets;
pub mod defsets;
pub mod defmaps;
pub mod group;
pub mod k1;
pub mod sample;
pub mod oracle;
