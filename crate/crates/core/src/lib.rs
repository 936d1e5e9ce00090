//! Reconstruction of a measure on finite modules from its surjection moments,
//! with certified two-sided brackets, plus the brute-force oracles that check
//! every closed form used along the way.

pub mod cli;
pub mod error;
pub mod finab;
pub mod inversion;
pub mod localize;
pub mod nonab_oracle;
pub mod qseries;
pub mod rational;
pub mod sampler;
pub mod smith;
pub mod surjcount;
pub mod verify;

pub use error::{Error, Result};
