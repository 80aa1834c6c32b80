pub mod arith;
pub mod cli;
pub mod cycle;
pub mod error;
pub mod geometry;
pub mod greens;
pub mod kummer;
pub mod ns;
pub mod verify;

pub use error::{Error, Result};
