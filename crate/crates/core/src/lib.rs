//! Matroid covering numbers, stacks, and the density reductions built on
//! them, computed exactly on small matroids given by rank oracles.

pub mod caps;
pub mod catalog;
pub mod covers;
pub mod error;
pub mod gf;
pub mod harness;
pub mod matroid;
pub mod minors;
pub mod numeric;
pub mod reduce;
pub mod rep;
pub mod stacks;
pub mod subset;

pub use error::{MdlError, Result};
pub use gf::{FiniteField, Matrix};
pub use matroid::{Matroid, RankOracle};
pub use subset::Subset;
