//! Spacing statistics and large sieve experiments for fractions whose
//! denominators are perfect powers.

pub mod error;
pub mod rationals;
pub mod spacing;
pub mod expsum;
pub mod sieve;
pub mod characters;
pub mod cli;

pub use error::{Error, Result};
