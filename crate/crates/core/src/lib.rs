//! Group-theoretic fast matrix multiplication.
//!
//! The crate builds the groups and subset families behind the group-algebra
//! approach to matrix multiplication, verifies their product properties by
//! exhaustive search, turns them into exponent bounds, and multiplies actual
//! integer matrices through the group algebra.

pub mod algebra;
pub mod bounds;
pub mod construct;
pub mod error;
pub mod group;
pub mod matmul;
pub mod product;
pub mod puzzle;

pub use error::{Error, Result};
