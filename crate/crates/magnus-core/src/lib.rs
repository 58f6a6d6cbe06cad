//! Exact arithmetic in the truncated completed tensor algebra `T(H)`,
//! reduced words and automorphisms of free groups, Magnus expansions with
//! their Johnson maps, and the Stasheff-complex cocycle with its
//! Maurer-Cartan evaluation model.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything here is safe to share across threads.

pub mod acceptance;
pub mod assoc;
pub mod error;
pub mod free_group;
pub mod json;
pub mod magnus;
pub mod rng_util;
pub mod scalar;
pub mod symplectic;
pub mod tensor;

pub use error::AlgebraError;
pub use free_group::{FreeAut, FreeEndo, FreeWord};
pub use magnus::MagnusExpansion;
pub use scalar::{Mode, Scalar};
pub use symplectic::SymplecticStructure;
pub use tensor::{FilteredAutomorphism, GradedDerivation, TensorSeries, Word};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, AlgebraError>;
