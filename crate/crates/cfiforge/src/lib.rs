pub mod error;
pub mod f2;
pub mod graphs;
pub mod perm;
pub mod cfi;
pub mod hfs;
pub mod xorcircuit;
pub mod genconstruct;
pub mod symanalysis;
pub mod sampling;

pub use error::{Error, Result};
