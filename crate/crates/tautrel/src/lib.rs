//! Exact computer algebra for the tautological ring of moduli of stable
//! curves.
//!
//! The crate builds generalized Faber-Zagier relations from hypergeometric
//! series data on stable dual graphs, reconstructs the same classes as
//! pole coefficients of a semisimple cohomological field theory obtained
//! from an R-matrix graph sum, and verifies both by exact pairing against
//! complementary-degree tautological classes. All arithmetic is in
//! arbitrary-precision rationals; nothing is floating point.

pub mod algebra;
pub mod asymptotics;
pub mod cohft;
pub mod error;
pub mod graph;
pub mod intersect;
pub mod pixton;
pub mod rational;
pub mod ring;
pub mod series;
pub mod util;

pub use error::{Error, Result};
pub use rational::Rat;
