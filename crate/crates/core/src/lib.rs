#![no_std]
extern crate alloc;

pub mod equivalence;
pub mod error;
pub mod linalg;
pub mod representation;
pub mod schmidt;
pub mod states;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::ToleranceConfig;
