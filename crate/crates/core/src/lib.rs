//! Executable combinatorics of multi-sorted finitary algebraic theories.

pub mod algebra;
pub mod error;
pub mod graded;
pub mod series;
pub mod signature;
pub mod simplicial;
pub mod theory;
pub mod trees;
pub mod verify;

pub use error::{Error, Result};
