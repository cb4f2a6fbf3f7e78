//! Bernoulli cylinder frame operators on the middle-thirds Cantor set.
//!
//! Finite frame operators `K_m`, the norm limit `K_∞`, their weighted Haar
//! matrix models, the self-similar fixed-point recursion, and the scalar
//! resolvent renormalization, each paired with an independent construction
//! that cross-checks it.

pub mod error;
pub mod frame;
pub mod haar;
pub mod linalg;
pub mod moments;
pub mod secular;
pub mod selfsim;
pub mod series;
pub mod spectral;
pub mod word;

pub use error::{Error, Result};
pub use frame::{Provenance, SymMatrix};
pub use haar::{BasisIndex, HaarFrame};
pub use word::{BranchWeights, Relation, Symbol, Word};
