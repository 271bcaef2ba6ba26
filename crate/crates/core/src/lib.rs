//! Weighted shifts on the free semigroup over `{g, h}`.
//!
//! Words, the colour map, the coloured tree and its components, truncated
//! operator realizations, the formal algebra of colour sequences, and the
//! norm experiments built on top of them.

pub mod error;
pub mod formal;
pub mod lab;
pub mod linalg;
pub mod semigroup;
pub mod space;
pub mod spectral;
pub mod tree;
pub mod unionfind;

pub use error::{Error, Result};
pub use formal::{realize, FormalElement};
pub use linalg::C64;
pub use semigroup::{colour_map, Colour, ColourSequence, DyadicWeight, Generator, Word};
pub use space::{SparseOperator, TruncatedBasis};
